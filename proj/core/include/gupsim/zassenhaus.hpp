#pragma once

#include <vector>

#include "gupsim/fock.hpp"
#include "gupsim/gup.hpp"
#include "gupsim/protocol.hpp"

namespace gupsim::zassenhaus {

using fock::FockOperator;
using fock::Index;

// U = e^{A+B} for one displacement pulse of duration t, A the β-independent
// part and B the β-proportional cubic part. Both are skew-Hermitian.
struct SplitGenerators {
  FockOperator A;
  FockOperator B;
  int order = 3;
};

// A = −t x0 η (a − a†),
// B = (ħβY/12) p0 [2(a − a†)³ + iπ(a† + a)³ + (4 − iπ)a†³ − (4 + iπ)a³],
// with Y = tΔkΩ₁Ω₂/Δ.
SplitGenerators pulse_split_generators(const protocol::LaserConfig& laser,
                                    const gup::GupParams& gup,
                                    const units::OscillatorScales& scales, double t, Index dim);

// C₁ = −[A,B]/2
// C₂ = [A,[A,B]]/6 + [B,[A,B]]/3
// C₃ = −[B,[A,[A,B]]]/8 − [B,[B,[A,B]]]/8 − [A,[A,[A,B]]]/24
// Returns C₁..C_order. Throws DomainError on dimension mismatch or order ∉ [1, 3].
std::vector<FockOperator> zassenhaus_terms(const FockOperator& A, const FockOperator& B,
                                           int order = 3);

// The parts of the same terms linear in B: −[A,B]/2, [A,[A,B]]/6, −[A,[A,[A,B]]]/24.
std::vector<FockOperator> zassenhaus_terms_first_order(const FockOperator& A,
                                                       const FockOperator& B, int order = 3);

// C₁ = iβ/32 (ħY)² (2π + (4i+π)a² + 4πa†a + (−4i+π)a†²)
// C₂ = iβ/96 (ħY)³ sqrt(1/2ħmν) ((4i+3π)a + (−4i+3π)a†)
// C₃ = iβπ/(256ħmν) (ħY)⁴ 𝟙
std::vector<FockOperator> c_terms_closed_form(const protocol::LaserConfig& laser,
                                              const gup::GupParams& gup,
                                              const units::OscillatorScales& scales, double t,
                                              Index dim);

struct GapReport {
  double kappa = 0.0;       // tΔkΩ₁Ω₂/Δ · sqrt(ħ/2mν)
  double c1_over_c3 = 0.0;  // ‖C₁‖ / |C₃|
  double c2_over_c3 = 0.0;  // ‖C₂‖ / |C₃|
};

// Ratios of the closed-form terms, operator norms taken on phonon numbers 0..n_max.
GapReport leading_order_gap(const protocol::LaserConfig& laser, const gup::GupParams& gup,
                            const units::OscillatorScales& scales, double t, Index dim,
                            Index n_max, fock::Norm mode = fock::Norm::spectral);

// ‖e^{A+B} − e^A e^B e^{C₁} ··· e^{C_k}‖ on phonon numbers 0..n_max.
double product_residual(const FockOperator& A, const FockOperator& B,
                        const std::vector<FockOperator>& terms, Index n_max,
                        fock::Norm mode = fock::Norm::spectral);

}  // namespace gupsim::zassenhaus
