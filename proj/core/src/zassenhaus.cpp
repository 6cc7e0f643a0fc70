#include "gupsim/zassenhaus.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gupsim/error.hpp"

namespace gupsim::zassenhaus {

using fock::Complex;
using fock::Matrix;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

void check_pair(const FockOperator& A, const FockOperator& B, int order) {
  if (A.dim() != B.dim()) {
    throw DomainError("zassenhaus: generator dimensions differ (" + std::to_string(A.dim()) +
                      " vs " + std::to_string(B.dim()) + ")");
  }
  if (order < 1 || order > 3) {
    throw DomainError("zassenhaus: order must be 1, 2 or 3");
  }
}

// Y = tΔkΩ₁Ω₂/Δ.
double y_factor(const protocol::LaserConfig& laser, double t) {
  return 2.0 * protocol::eta(laser) * t;
}

}  // namespace

SplitGenerators pulse_split_generators(const protocol::LaserConfig& laser,
                                    const gup::GupParams& gup,
                                    const units::OscillatorScales& scales, double t,
                                    Index dim) {
  gup::check_consistent(gup, scales);
  const fock::Ladder l = fock::ladder(dim);
  const Matrix& a = l.a.matrix();
  const Matrix& ad = l.adag.matrix();
  const Matrix diff = a - ad;
  const Matrix sum = ad + a;
  const double y = y_factor(laser, t);

  Matrix A = (-t * scales.x0 * protocol::eta(laser)) * diff;

  const double cb = scales.hbar * gup.beta * y / 12.0 * scales.p0;
  const Matrix bracket = 2.0 * (diff * diff * diff) + (kI * kPi) * (sum * sum * sum) +
                         (4.0 - kI * kPi) * (ad * ad * ad) - (4.0 + kI * kPi) * (a * a * a);
  Matrix B = cb * bracket;
  return SplitGenerators{FockOperator(std::move(A)), FockOperator(std::move(B)), 3};
}

std::vector<FockOperator> zassenhaus_terms(const FockOperator& A, const FockOperator& B,
                                           int order) {
  check_pair(A, B, order);
  using fock::commutator;
  const FockOperator ab = commutator(A, B);
  std::vector<FockOperator> out;
  out.push_back(Complex(-0.5) * ab);
  if (order == 1) return out;
  const FockOperator a_ab = commutator(A, ab);
  const FockOperator b_ab = commutator(B, ab);
  out.push_back(Complex(1.0 / 6.0) * a_ab + Complex(1.0 / 3.0) * b_ab);
  if (order == 2) return out;
  out.push_back(Complex(-1.0 / 8.0) * commutator(B, a_ab) -
                Complex(1.0 / 8.0) * commutator(B, b_ab) -
                Complex(1.0 / 24.0) * commutator(A, a_ab));
  return out;
}

std::vector<FockOperator> zassenhaus_terms_first_order(const FockOperator& A,
                                                       const FockOperator& B, int order) {
  check_pair(A, B, order);
  using fock::commutator;
  const FockOperator ab = commutator(A, B);
  std::vector<FockOperator> out;
  out.push_back(Complex(-0.5) * ab);
  if (order == 1) return out;
  const FockOperator a_ab = commutator(A, ab);
  out.push_back(Complex(1.0 / 6.0) * a_ab);
  if (order == 2) return out;
  out.push_back(Complex(-1.0 / 24.0) * commutator(A, a_ab));
  return out;
}

std::vector<FockOperator> c_terms_closed_form(const protocol::LaserConfig& laser,
                                              const gup::GupParams& gup,
                                              const units::OscillatorScales& scales, double t,
                                              Index dim) {
  gup::check_consistent(gup, scales);
  const fock::Ladder l = fock::ladder(dim);
  const Matrix& a = l.a.matrix();
  const Matrix& ad = l.adag.matrix();
  const Matrix id = Matrix::Identity(dim, dim);
  const double hy = scales.hbar * y_factor(laser, t);
  const double beta = gup.beta;
  const double hmn = scales.hbar * scales.mass * scales.trap_freq;

  const Complex c1 = kI * beta / 32.0 * hy * hy;
  Matrix m1 = c1 * (2.0 * kPi * id + (4.0 * kI + kPi) * (a * a) + 4.0 * kPi * (ad * a) +
                    (-4.0 * kI + kPi) * (ad * ad));

  const Complex c2 = kI * beta / 96.0 * hy * hy * hy * std::sqrt(1.0 / (2.0 * hmn));
  Matrix m2 = c2 * ((4.0 * kI + 3.0 * kPi) * a + (-4.0 * kI + 3.0 * kPi) * ad);

  const Complex c3 = kI * beta * kPi / (256.0 * hmn) * std::pow(hy, 4);
  Matrix m3 = c3 * id;

  return {FockOperator(std::move(m1)), FockOperator(std::move(m2)), FockOperator(std::move(m3))};
}

GapReport leading_order_gap(const protocol::LaserConfig& laser, const gup::GupParams& gup,
                            const units::OscillatorScales& scales, double t, Index dim,
                            Index n_max, fock::Norm mode) {
  const std::vector<FockOperator> c = c_terms_closed_form(laser, gup, scales, t, dim);
  GapReport r;
  r.kappa = y_factor(laser, t) * scales.x0;
  const double c3 = std::abs(c[2].matrix()(0, 0));
  const double c1 = fock::norm(c[0].interior(n_max), mode);
  const double c2 = fock::norm(c[1].interior(n_max), mode);
  if (c3 == 0.0) {
    // β = 0 or t = 0: every term vanishes together.
    if (c1 != 0.0 || c2 != 0.0) {
      throw DomainError("leading_order_gap: C3 vanishes while C1 or C2 does not");
    }
    return r;
  }
  r.c1_over_c3 = c1 / c3;
  r.c2_over_c3 = c2 / c3;
  return r;
}

double product_residual(const FockOperator& A, const FockOperator& B,
                        const std::vector<FockOperator>& terms, Index n_max, fock::Norm mode) {
  check_pair(A, B, 1);
  const fock::UnitaryOperator full = fock::expm_generator(A + B);
  fock::UnitaryOperator prod = fock::expm_generator(A);
  prod = prod * fock::expm_generator(B);
  for (const FockOperator& c : terms) {
    prod = prod * fock::expm_generator(c);
  }
  const FockOperator diff(Matrix(full.matrix() - prod.matrix()));
  return fock::norm(diff.interior(n_max), mode);
}

}  // namespace gupsim::zassenhaus
