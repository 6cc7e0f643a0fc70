#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gupsim/error.hpp"
#include "gupsim/fock.hpp"

using namespace gupsim;
using fock::Complex;
using fock::FockOperator;
using fock::Matrix;

namespace {

Matrix truncation_identity(fock::Index d) {
  Matrix m = Matrix::Identity(d, d);
  m(d - 1, d - 1) = Complex(1.0 - static_cast<double>(d), 0.0);
  return m;
}

FockOperator random_hermitian(fock::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(d, d);
  for (fock::Index i = 0; i < d; ++i) {
    for (fock::Index j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  return FockOperator(Matrix((m + m.adjoint()) / 2.0));
}

}  // namespace

TEST_CASE("ladder operators") {
  const auto l2 = fock::ladder(2);
  CHECK(l2.a.matrix()(0, 1) == Complex(1.0, 0.0));
  CHECK(l2.a.matrix()(0, 0) == Complex(0.0, 0.0));
  CHECK(l2.a.matrix()(1, 0) == Complex(0.0, 0.0));
  CHECK(l2.a.matrix()(1, 1) == Complex(0.0, 0.0));

  const auto l4 = fock::ladder(4);
  CHECK(l4.a.matrix()(2, 3).real() == doctest::Approx(std::sqrt(3.0)));

  for (fock::Index d : {3, 10, 33}) {
    const auto l = fock::ladder(d);
    const Matrix c = fock::commutator(l.a, l.adag).matrix();
    CHECK((c - truncation_identity(d)).norm() < 1e-12);
  }
  CHECK_THROWS_AS(fock::ladder(1), DomainError);
}

TEST_CASE("quadratures") {
  const auto natural = units::OscillatorScales::natural();
  const auto q2 = fock::quadratures(2, natural);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(q2.x.matrix()(0, 1).real() == doctest::Approx(s));
  CHECK(q2.x.matrix()(1, 0).real() == doctest::Approx(s));
  CHECK(std::abs(q2.x.matrix()(0, 0)) == 0.0);

  const auto q = fock::quadratures(16, natural);
  const Matrix c = fock::commutator(q.x, q.p).matrix();
  CHECK((c - Complex(0.0, 1.0) * truncation_identity(16)).norm() < 1e-12);
  CHECK(q.x.is_hermitian());
  CHECK(q.p.is_hermitian());
}

TEST_CASE("commutator identities") {
  const auto l = fock::ladder(12);
  CHECK(fock::norm(fock::commutator(l.a, l.a)) == 0.0);
  const FockOperator number = l.adag * l.a;
  CHECK(fock::op_distance(fock::commutator(l.a, number), l.a) < 1e-12);
}

TEST_CASE("matrix exponential of generators") {
  const fock::Index d = 64;
  CHECK(fock::op_distance(fock::expm_generator(FockOperator::zero(d)).as_operator(),
                          FockOperator::identity(d)) < 1e-13);

  const double theta = 0.7;
  const auto u = fock::expm_generator(Complex(0.0, theta) * FockOperator::identity(d));
  CHECK(fock::op_distance(u.as_operator(), std::polar(1.0, theta) * FockOperator::identity(d)) <
        1e-12);

  // Displacement e^{-i s x}: vacuum overlap exp(-(s x0)^2 / 2).
  const auto natural = units::OscillatorScales::natural();
  const auto q = fock::quadratures(d, natural);
  for (double s : {0.3, 1.0, 2.0}) {
    const auto disp = fock::expm_generator(Complex(0.0, -s) * q.x);
    const double expected = std::exp(-std::pow(s * natural.x0, 2) / 2.0);
    CHECK(std::abs(disp.matrix()(0, 0) - expected) < 1e-10);
    CHECK(disp.unitarity_defect() < 1e-10);
  }
}

TEST_CASE("expm_i_hermitian matches expm_generator") {
  std::mt19937_64 rng(7);
  const FockOperator h = random_hermitian(10, rng);
  const auto a = fock::expm_i_hermitian(h, 0.3);
  const auto b = fock::expm_generator(Complex(0.0, 0.3) * h);
  CHECK(fock::op_distance(a.as_operator(), b.as_operator()) < 1e-12);
}

TEST_CASE("operator distance") {
  std::mt19937_64 rng(11);
  const FockOperator a = random_hermitian(9, rng);
  const FockOperator b = random_hermitian(9, rng);
  CHECK(fock::op_distance(a, a) == 0.0);
  CHECK(fock::op_distance(a, b) == doctest::Approx(fock::op_distance(b, a)).epsilon(1e-14));

  const double theta = 1.1;
  const fock::Index d = 9;
  const double frob =
      fock::op_distance(FockOperator::identity(d), std::polar(1.0, theta) * FockOperator::identity(d),
                        fock::Norm::frobenius);
  CHECK(frob == doctest::Approx(std::sqrt(9.0) * std::abs(std::polar(1.0, theta) - 1.0)));
}

TEST_CASE("operator construction is validated") {
  CHECK_THROWS_AS(FockOperator(Matrix(2, 3)), DomainError);
  CHECK_THROWS_AS(FockOperator(Matrix(0, 0)), DomainError);
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(FockOperator{m}, DomainError);
}

TEST_CASE("binary operator dump round trip") {
  std::mt19937_64 rng(3);
  const FockOperator a = random_hermitian(5, rng);
  std::stringstream buf;
  fock::write_operator(buf, a);
  CHECK(buf.str().size() == 8 + 8 + 5 * 5 * 16);
  CHECK(buf.str().substr(0, 8) == "GUPSIMOP");
  const FockOperator b = fock::read_operator(buf);
  CHECK(fock::op_distance(a, b) == 0.0);

  std::stringstream bad("NOTMAGIC");
  CHECK_THROWS(fock::read_operator(bad));
}

TEST_CASE("truncation doubling policy") {
  const auto ok = fock::converge_in_dim([](fock::Index d) { return 1.0 + std::exp(-double(d)); },
                                        8, 1e-8);
  CHECK(ok.dim >= 16);
  CHECK(ok.value == doctest::Approx(1.0));
  CHECK(ok.history.size() >= 2);
  CHECK_THROWS_AS(fock::converge_in_dim([](fock::Index d) { return double(d); }, 8, 1e-8, 128),
                  ConvergenceError);
}
