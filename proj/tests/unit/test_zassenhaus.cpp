#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gupsim/error.hpp"
#include "gupsim/fit.hpp"
#include "gupsim/zassenhaus.hpp"

using namespace gupsim;
using fock::Complex;
using fock::FockOperator;
using fock::Matrix;

namespace {

FockOperator random_skew(fock::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(d, d);
  for (fock::Index i = 0; i < d; ++i) {
    for (fock::Index j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  const Matrix s = (m - m.adjoint()) / 2.0;
  return FockOperator(Matrix(s / s.norm()));
}

double total_norm(const std::vector<FockOperator>& terms) {
  double s = 0.0;
  for (const auto& t : terms) s += fock::norm(t);
  return s;
}

}  // namespace

TEST_CASE("Zassenhaus terms vanish for commuting or zero generators") {
  std::mt19937_64 rng(5);
  const FockOperator a = random_skew(8, rng);
  CHECK(total_norm(zassenhaus::zassenhaus_terms(a, Complex(2.0, 0.0) * a)) < 1e-14);
  CHECK(total_norm(zassenhaus::zassenhaus_terms(a, FockOperator::zero(8))) == 0.0);
  CHECK(zassenhaus::zassenhaus_terms(a, a, 2).size() == 2);
}

TEST_CASE("Zassenhaus argument checks") {
  std::mt19937_64 rng(6);
  const FockOperator a = random_skew(8, rng);
  const FockOperator b = random_skew(6, rng);
  CHECK_THROWS_AS(zassenhaus::zassenhaus_terms(a, b), DomainError);
  CHECK_THROWS_AS(zassenhaus::zassenhaus_terms(a, a, 0), DomainError);
  CHECK_THROWS_AS(zassenhaus::zassenhaus_terms(a, a, 4), DomainError);
}

TEST_CASE("product residual for generic matrices is of total degree five") {
  // C1..C3 are the degree 2..4 terms. Nested commutators of generic 8x8
  // matrices do not terminate, so the residual keeps A^4 B pieces.
  std::mt19937_64 rng(9);
  const FockOperator a0 = random_skew(8, rng);
  const FockOperator b0 = Complex(1e-3, 0.0) * random_skew(8, rng);
  std::vector<double> ts{0.05, 0.1, 0.2}, res;
  for (double t : ts) {
    const FockOperator a = Complex(t, 0.0) * a0;
    const FockOperator b = Complex(t, 0.0) * b0;
    res.push_back(zassenhaus::product_residual(a, b, zassenhaus::zassenhaus_terms(a, b), 7));
  }
  CHECK(loglog_slope(ts, res) == doctest::Approx(5.0).epsilon(0.03));
}

TEST_CASE("closed-form terms in natural units") {
  // X = 1, beta = 1: C3 = i pi / 256.
  const auto plan = protocol::natural_plan(1.0 / std::sqrt(2.0), 1.0, 1);
  const auto c = zassenhaus::c_terms_closed_form(plan.laser, plan.gup, plan.scales,
                                                 plan.laser.pulse_duration, 16);
  REQUIRE(c.size() == 3);
  const FockOperator expected = Complex(0.0, std::numbers::pi / 256.0) * FockOperator::identity(16);
  CHECK(fock::op_distance(c[2], expected) < 1e-14);

  const auto zero = protocol::natural_plan(1.0, 0.0, 1);
  CHECK(total_norm(zassenhaus::c_terms_closed_form(zero.laser, zero.gup, zero.scales,
                                                   zero.laser.pulse_duration, 16)) == 0.0);
}

TEST_CASE("closed forms match nested commutators to first order in beta") {
  const fock::Index d = 64;
  const fock::Index n_max = d / 2 - 8;
  for (double kappa : {0.7, 3.0}) {
    const auto plan = protocol::natural_plan(kappa, 1e-3, 1);
    const double t = plan.laser.pulse_duration;
    const auto g = zassenhaus::pulse_split_generators(plan.laser, plan.gup, plan.scales, t, d);
    CHECK(g.A.is_skew_hermitian());
    CHECK(g.B.is_skew_hermitian());
    const auto first = zassenhaus::zassenhaus_terms_first_order(g.A, g.B);
    const auto closed = zassenhaus::c_terms_closed_form(plan.laser, plan.gup, plan.scales, t, d);
    for (int k = 0; k < 3; ++k) {
      const double scale = fock::norm(first[k].interior(n_max));
      CHECK(fock::op_distance(first[k].interior(n_max), closed[k].interior(n_max)) <= 1e-8 * scale);
    }
  }
}

TEST_CASE("split product residual is second order in beta") {
  std::vector<double> betas{1e-4, 1e-3}, res;
  for (double beta : betas) {
    const auto plan = protocol::natural_plan(1.0, beta, 1);
    const auto g = zassenhaus::pulse_split_generators(plan.laser, plan.gup, plan.scales,
                                                   plan.laser.pulse_duration, 64);
    res.push_back(zassenhaus::product_residual(g.A, g.B, zassenhaus::zassenhaus_terms(g.A, g.B), 16));
  }
  CHECK(loglog_slope(betas, res) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("leading-order gap") {
  const auto gap = [](double kappa) {
    const auto plan = protocol::natural_plan(kappa, 1e-4, 1);
    return zassenhaus::leading_order_gap(plan.laser, plan.gup, plan.scales,
                                         plan.laser.pulse_duration, 64, 16);
  };
  const auto g4 = gap(4.0);
  const auto g8 = gap(8.0);
  CHECK(g4.kappa == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(g8.c1_over_c3 < g4.c1_over_c3);
  CHECK(g8.c1_over_c3 / g4.c1_over_c3 == doctest::Approx(0.25).epsilon(1e-6));

  const auto plan = protocol::natural_plan(4.0, 1e-4, 1);
  const auto at_zero = zassenhaus::leading_order_gap(plan.laser, plan.gup, plan.scales, 0.0, 32, 8);
  CHECK(at_zero.c1_over_c3 == 0.0);
  CHECK(at_zero.c2_over_c3 == 0.0);
}

TEST_CASE("log-log slope fit") {
  const std::vector<double> x{1, 2, 4}, y{3, 12, 48};
  CHECK(loglog_slope(x, y) == doctest::Approx(2.0));
  const std::vector<double> one{1};
  CHECK_THROWS_AS(loglog_slope(one, one), DomainError);
}
