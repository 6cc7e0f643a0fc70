#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "gupsim/error.hpp"
#include "gupsim/fock.hpp"
#include "gupsim/gup.hpp"

using namespace gupsim;
using fock::FockOperator;

namespace {

const units::OscillatorScales kNatural = units::OscillatorScales::natural();

gup::GupParams natural_params(double beta) {
  return gup::make_gup_params(beta, 1.0, 1.0, units::PhysicalConstants::natural());
}

Eigen::VectorXd eigenvalues(const FockOperator& h) {
  Eigen::SelfAdjointEigenSolver<fock::Matrix> es(h.matrix());
  return es.eigenvalues();
}

}  // namespace

TEST_CASE("beta from beta0") {
  const auto c = units::pinned_constants();
  CHECK(gup::beta_from_beta0(0.0, c) == 0.0);
  const double one = gup::beta_from_beta0(1.0, c);
  CHECK(one == doctest::Approx(1.0 / std::pow(c.planck_mass * c.c, 2)).epsilon(1e-14));
  CHECK(one == doctest::Approx(2.35e-2).epsilon(5e-3));
  CHECK(gup::beta_from_beta0(1e33, c) == doctest::Approx(2.35e31).epsilon(5e-3));
  CHECK_THROWS_AS(gup::beta_from_beta0(-1.0, c), DomainError);
}

TEST_CASE("deformed momentum") {
  const auto q = fock::quadratures(24, kNatural);
  CHECK(fock::op_distance(gup::deformed_momentum(q.p, 0.0), q.p) == 0.0);

  // Deformation widens the spectrum on the interior block.
  const auto spread = [](const FockOperator& op) {
    const auto ev = eigenvalues(op.interior(8));
    return ev.maxCoeff() - ev.minCoeff();
  };
  CHECK(spread(gup::deformed_momentum(q.p, 1e-2)) > spread(q.p));
  CHECK(gup::deformed_momentum(q.p, 1e-2).is_hermitian());
}

TEST_CASE("deformed oscillator Hamiltonian") {
  SUBCASE("harmonic spectrum at beta = 0") {
    const auto ev = eigenvalues(gup::deformed_h0(natural_params(0.0), kNatural, 48));
    for (int n = 0; n < 16; ++n) CHECK(ev(n) == doctest::Approx(n + 0.5).epsilon(1e-12));
  }
  SUBCASE("first-order ground-state shift beta p0^4 / m") {
    for (double beta : {1e-5, 1e-4}) {
      const auto ev = eigenvalues(gup::deformed_h0(natural_params(beta), kNatural, 48));
      const double shift = ev(0) - 0.5;
      const double first_order = beta * std::pow(kNatural.p0, 4);
      CHECK(std::abs(shift / first_order - 1.0) < 20.0 * beta);
    }
  }
}

TEST_CASE("analytic Heisenberg position operator") {
  const fock::Index d = 48;
  const auto q = fock::quadratures(d, kNatural);
  SUBCASE("t = 0 cancels every beta term") {
    for (double beta : {0.0, 1e-3, 0.1}) {
      CHECK(fock::op_distance(gup::x_heisenberg_analytic(0.0, natural_params(beta), kNatural, d),
                              q.x) < 1e-14);
    }
  }
  SUBCASE("quarter period at beta = 0 gives p / m nu") {
    const auto x = gup::x_heisenberg_analytic(std::numbers::pi / 2.0, natural_params(0.0), kNatural, d);
    CHECK(fock::op_distance(x, q.p) < 1e-12);
  }
  SUBCASE("first-order agreement with the numeric oracle") {
    const auto p = natural_params(1e-4);
    const auto a = gup::x_heisenberg_analytic(1.0, p, kNatural, 64);
    const auto n = gup::x_heisenberg_numeric(1.0, p, kNatural, 64);
    const auto harmonic = gup::x_heisenberg_analytic(1.0, natural_params(0.0), kNatural, 64);
    const double first_order = fock::op_distance(a.interior(16), harmonic.interior(16));
    CHECK(fock::op_distance(a.interior(16), n.interior(16)) < 0.05 * first_order);
  }
}

TEST_CASE("numeric Heisenberg position operator") {
  const fock::Index d = 64;
  const auto q = fock::quadratures(d, kNatural);
  CHECK(fock::op_distance(gup::x_heisenberg_numeric(0.0, natural_params(1e-3), kNatural, d), q.x) <
        1e-12);
  for (double t : {0.3, 1.0, 2.5}) {
    const FockOperator harmonic = std::cos(t) * q.x + std::sin(t) * q.p;
    const auto n = gup::x_heisenberg_numeric(t, natural_params(0.0), kNatural, d);
    CHECK(fock::op_distance(n.interior(32), harmonic.interior(32)) < 1e-10);
  }
}

TEST_CASE("numeric oracle error scales as beta squared") {
  std::vector<double> diffs;
  for (double beta : {1e-5, 1e-4, 1e-3}) {
    const auto p = natural_params(beta);
    diffs.push_back(fock::op_distance(gup::x_heisenberg_analytic(1.0, p, kNatural, 64).interior(32),
                                      gup::x_heisenberg_numeric(1.0, p, kNatural, 64).interior(32)));
  }
  const double slope1 = std::log10(diffs[1] / diffs[0]);
  const double slope2 = std::log10(diffs[2] / diffs[1]);
  CHECK(slope1 == doctest::Approx(2.0).epsilon(0.1));
  CHECK(slope2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("converged numeric oracle") {
  const auto r = gup::x_heisenberg_numeric_converged(1.0, natural_params(1e-4), kNatural, 8);
  CHECK(r.convergence.dim >= 16);
  CHECK(r.x.dim() == r.convergence.dim);
}

TEST_CASE("scales must describe the deformed oscillator") {
  const auto other = units::oscillator_scales(2.0, 1.0, units::PhysicalConstants::natural());
  CHECK_THROWS_AS(gup::check_consistent(natural_params(0.0), other), DomainError);
  CHECK_NOTHROW(gup::check_consistent(natural_params(0.0), kNatural));
}
