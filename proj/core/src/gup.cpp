#include "gupsim/gup.hpp"

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Eigenvalues>

#include "gupsim/error.hpp"

namespace gupsim::gup {

using fock::Complex;
using fock::Matrix;

double beta_from_beta0(double beta0, const units::PhysicalConstants& constants) {
  if (!(beta0 >= 0.0) || !std::isfinite(beta0)) {
    throw DomainError("beta_from_beta0: beta0 must be finite and non-negative");
  }
  const double momentum_scale = constants.planck_mass * constants.c;
  return beta0 / (momentum_scale * momentum_scale);
}

GupParams make_gup_params(double beta0, double mass, double trap_freq,
                          const units::PhysicalConstants& constants) {
  if (!(mass > 0.0) || !(trap_freq > 0.0)) {
    throw DomainError("make_gup_params: mass and trap frequency must be positive");
  }
  return GupParams{beta0, beta_from_beta0(beta0, constants), mass, trap_freq};
}

void check_consistent(const GupParams& params, const units::OscillatorScales& scales) {
  const auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
  };
  if (!close(params.mass, scales.mass) || !close(params.trap_freq, scales.trap_freq)) {
    throw DomainError("GUP parameters and oscillator scales describe different oscillators");
  }
}

FockOperator deformed_momentum(const FockOperator& p, double beta) {
  if (!p.is_hermitian(1e-12)) {
    throw DomainError("deformed_momentum: p must be Hermitian");
  }
  const Matrix& m = p.matrix();
  return FockOperator(Matrix(m + (beta / 3.0) * (m * m * m)));
}

FockOperator deformed_h0(const GupParams& params, const units::OscillatorScales& scales,
                         Index dim) {
  check_consistent(params, scales);
  constexpr Index kPad = 4;
  const fock::Quadratures q = fock::quadratures(dim + kPad, scales);
  const Matrix& x = q.x.matrix();
  const Matrix& p = q.p.matrix();
  const Matrix p2 = p * p;
  const double m = params.mass;
  const double nu = params.trap_freq;
  Matrix h = p2 / (2.0 * m) + (0.5 * m * nu * nu) * (x * x) +
             (params.beta / (3.0 * m)) * (p2 * p2);
  return FockOperator(Matrix(h.topLeftCorner(dim, dim)));
}

FockOperator x_heisenberg_analytic(double t, const GupParams& params,
                                   const units::OscillatorScales& scales, Index dim) {
  check_consistent(params, scales);
  const fock::Ladder l = fock::ladder(dim);
  const Matrix& a = l.a.matrix();
  const Matrix& ad = l.adag.matrix();
  const Matrix a2 = a * a;
  const Matrix ad2 = ad * ad;

  const double nu = params.trap_freq;
  const double tn = t * nu;
  const Complex i(0.0, 1.0);
  const auto e = [&](int k) { return std::exp(i * (static_cast<double>(k) * tn)); };
  const double s = std::sin(tn);

  // Harmonic part: x0 (a e^{−iνt} + a† e^{iνt}).
  Matrix x = scales.x0 * (e(-1) * a + e(1) * ad);

  // β part, term by term:
  //   β e^{−3iνt}/12 · sqrt(ħ³mν/2) · [
  //       −6 e^{2iνt} (−1 + e^{2iνt} + 2iνt) a
  //     + 12i e^{3iνt} (e^{iνt} νt + sin νt) a†
  //     + (2e^{2iνt} − 3 + e^{4iνt}) a³
  //     − (12i e^{2iνt} νt + 12i e^{3iνt} sin νt) a†a²
  //     + (12i e^{4iνt} νt + 12i e^{3iνt} sin νt) a†²a
  //     + (e^{2iνt} + 2e^{4iνt} − 3e^{6iνt}) a†³ ]
  // with ω read as ν. sqrt(ħ³mν/2) = ħ p0.
  const Complex c_a = -6.0 * e(2) * (-1.0 + e(2) + 2.0 * i * tn);
  const Complex c_ad = 12.0 * i * e(3) * (e(1) * tn + s);
  const Complex c_a3 = 2.0 * e(2) - 3.0 + e(4);
  const Complex c_ada2 = -(12.0 * i * e(2) * tn + 12.0 * i * e(3) * s);
  const Complex c_ad2a = 12.0 * i * e(4) * tn + 12.0 * i * e(3) * s;
  const Complex c_ad3 = e(2) + 2.0 * e(4) - 3.0 * e(6);

  const Complex prefactor = params.beta * e(-3) / 12.0 * (scales.hbar * scales.p0);
  if (prefactor != Complex(0.0, 0.0)) {
    const Matrix bracket = c_a * a + c_ad * ad + c_a3 * (a2 * a) + c_ada2 * (ad * a2) +
                           c_ad2a * (ad2 * a) + c_ad3 * (ad2 * ad);
    x += prefactor * bracket;
  }
  return FockOperator(std::move(x));
}

HeisenbergEvolver::HeisenbergEvolver(const GupParams& params,
                                     const units::OscillatorScales& scales, Index dim)
    : x_(fock::quadratures(dim, scales).x) {
  const FockOperator h0 = deformed_h0(params, scales, dim);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h0.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error("HeisenbergEvolver: eigendecomposition of H0 failed");
  }
  energies_over_hbar_ = solver.eigenvalues() / scales.hbar;
  eigenvectors_ = solver.eigenvectors();
  x_eigenbasis_ = eigenvectors_.adjoint() * x_.matrix() * eigenvectors_;
}

FockOperator HeisenbergEvolver::x_at(double t) const {
  // (V† x V)_{jk} e^{i(E_j − E_k)t/ħ}, then back to the number basis.
  const Index d = dim();
  const Eigen::VectorXcd ph =
      (Complex(0.0, t) * energies_over_hbar_.cast<Complex>()).array().exp();
  Matrix rotated(d, d);
  for (Index k = 0; k < d; ++k) {
    for (Index j = 0; j < d; ++j) {
      rotated(j, k) = ph(j) * x_eigenbasis_(j, k) * std::conj(ph(k));
    }
  }
  return FockOperator(Matrix(eigenvectors_ * rotated * eigenvectors_.adjoint()));
}

FockOperator x_heisenberg_numeric(double t, const GupParams& params,
                                  const units::OscillatorScales& scales, Index dim) {
  return HeisenbergEvolver(params, scales, dim).x_at(t);
}

ConvergedOperator x_heisenberg_numeric_converged(double t, const GupParams& params,
                                                 const units::OscillatorScales& scales,
                                                 Index n_max) {
  const auto target = [&](Index dim) {
    return x_heisenberg_numeric(t, params, scales, dim).interior(n_max).matrix().norm();
  };
  fock::ConvergedValue cv = fock::converge_in_dim(target, 2 * (n_max + 1));
  return ConvergedOperator{x_heisenberg_numeric(t, params, scales, cv.dim), std::move(cv)};
}

}  // namespace gupsim::gup
