#pragma once

#include <Eigen/Dense>

#include "gupsim/fock.hpp"
#include "gupsim/units.hpp"

namespace gupsim::gup {

using fock::FockOperator;
using fock::Index;

// Deformation strength plus the oscillator it deforms.
struct GupParams {
  double beta0 = 0.0;      // dimensionless
  double beta = 0.0;       // (momentum)^-2 in the unit system of the constants
  double mass = 0.0;       // kg
  double trap_freq = 0.0;  // rad/s
};

// β = β0 / (M_p c)². Throws DomainError for negative β0.
double beta_from_beta0(double beta0, const units::PhysicalConstants& constants);

GupParams make_gup_params(double beta0, double mass, double trap_freq,
                          const units::PhysicalConstants& constants);

// p̂ = p (1 + β p² / 3).
FockOperator deformed_momentum(const FockOperator& p, double beta);

// p²/2m + m ν² x²/2 + β p⁴/3m. Powers are formed in a padded basis and
// cropped, so every stored matrix element equals the untruncated one.
FockOperator deformed_h0(const GupParams& params, const units::OscillatorScales& scales,
                         Index dim);

// First-order-in-β Heisenberg position operator in closed form.
FockOperator x_heisenberg_analytic(double t, const GupParams& params,
                                   const units::OscillatorScales& scales, Index dim);

// e^{iH₀t/ħ} x e^{−iH₀t/ħ} with the deformed H₀ diagonalized once.
class HeisenbergEvolver {
 public:
  HeisenbergEvolver(const GupParams& params, const units::OscillatorScales& scales,
                    Index dim);

  FockOperator x_at(double t) const;
  Index dim() const { return x_.dim(); }

 private:
  FockOperator x_;
  Eigen::VectorXd energies_over_hbar_;
  fock::Matrix eigenvectors_;
  fock::Matrix x_eigenbasis_;
};

FockOperator x_heisenberg_numeric(double t, const GupParams& params,
                                  const units::OscillatorScales& scales, Index dim);

// Numeric x̂(t) with the dimension chosen by the doubling policy: the target
// scalar is the Frobenius norm of the block on phonon numbers 0..n_max.
struct ConvergedOperator {
  FockOperator x;
  fock::ConvergedValue convergence;
};
ConvergedOperator x_heisenberg_numeric_converged(double t, const GupParams& params,
                                                 const units::OscillatorScales& scales,
                                                 Index n_max);

// Throws DomainError unless `scales` describes the oscillator in `params`.
void check_consistent(const GupParams& params, const units::OscillatorScales& scales);

}  // namespace gupsim::gup
