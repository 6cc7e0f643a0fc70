#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ranges>
#include <string>
#include <vector>

#include "gupsim/fock.hpp"
#include "gupsim/gup.hpp"
#include "gupsim/units.hpp"

namespace gupsim::protocol {

using fock::FockOperator;
using fock::Index;
using fock::UnitaryOperator;
using units::BigFloat;

// Ω̃ = ħΩ₁Ω₂(Δ₁+Δ₂)/(8Δ₁Δ₂) with Δ₁ = Δ, Δ₂ = Δ + ν (exact), or the
// Δ₁ ≈ Δ₂ ≈ Δ limit ħΩ₁Ω₂/(4Δ) (simplified).
enum class DetuningModel { exact, simplified };

// Where the numeric oracle takes x̂(t_i) from.
enum class XSource { analytic, numeric };

struct LaserConfig {
  std::array<double, 4> rabi{};    // Ω₁..Ω₄, rad/s
  double detuning = 0.0;           // Δ, rad/s
  std::array<double, 4> k_proj{};  // k_x1..k_x4, rad/m
  std::array<double, 4> phases{};  // φ₁..φ₄, rad (pulse settings replace the differences)
  double pulse_duration = 0.0;     // t_p, s
  double wavelength = 0.0;         // m

  // Δk = k_x4 + k_x2 − k_x3 − k_x1.
  double delta_k() const;

  // Ω₃ = Ω₁, Ω₄ = Ω₂ and projections k_x1 = k_x3 = −Δk/4, k_x2 = k_x4 = Δk/4.
  static LaserConfig symmetric(double rabi1, double rabi2, double detuning, double delta_k,
                               double pulse_duration, double wavelength);

  // Throws DomainError: Ω₁ ≠ Ω₃ or Ω₂ ≠ Ω₄, t_p ≤ 0, non-finite fields.
  void validate() const;
};

inline constexpr double kPulseDurationWarnThreshold = 0.05;

// Non-fatal diagnostics, e.g. t_p·ν above the frozen-x̂ threshold.
std::vector<std::string> laser_warnings(const LaserConfig& laser, double trap_freq);

// (φ₁ − φ₂, φ₄ − φ₃) for pulse i.
struct PhaseSetting {
  double d12 = 0.0;
  double d43 = 0.0;
  bool operator==(const PhaseSetting&) const = default;
};
PhaseSetting phase_settings(std::uint64_t i);

// η = Δk Ω₁ Ω₂ / 2Δ. Throws DomainError for Δ = 0.
double eta(const LaserConfig& laser);

// ξ̃ = ħ³π/(256 m ν) (Δk Ω₁ Ω₂ / Δ)⁴; the β-phase increment of pulse i is
// i·β·ξ̃·t_p⁴.
double xi_tilde(const LaserConfig& laser, const units::OscillatorScales& scales);

double omega_tilde(const LaserConfig& laser, const units::OscillatorScales& scales,
                   DetuningModel model);

// Parameters as written in configs and the species catalog.
struct PlanInputs {
  double mass_u = 0.0;          // mass in atomic mass units of the constant table
  double trap_freq_hz = 0.0;    // ν / 2π
  double pulse_duration = 0.0;  // s
  double rabi1 = 0.0;           // rad/s
  double rabi2 = 0.0;           // rad/s
  double detuning = 0.0;        // rad/s
  std::optional<double> wavelength;  // m; |k| = 2π/λ
  std::optional<double> k_over_2pi;  // 1/m; takes precedence over wavelength
  double dk_over_k = 0.0;
  std::uint64_t cycles = 0;
  double beta0 = 0.0;

  double k_magnitude() const;
};

struct PlanOptions {
  DetuningModel detuning_model = DetuningModel::exact;
  bool lamb_dicke = true;
  XSource x_source = XSource::analytic;
};

struct ScheduledPulse {
  std::uint64_t index = 0;
  PhaseSetting setting;

  // ν t_i = (π/2) i, kept as an exact multiple of π.
  units::BigAngle phase_angle(unsigned precision_bits) const;
  double time(double trap_freq) const;
};

struct PulsePlan {
  PlanInputs inputs;
  units::PhysicalConstants constants;
  PlanOptions options;
  LaserConfig laser;
  gup::GupParams gup;
  units::OscillatorScales scales;
  std::vector<std::string> warnings;

  std::uint64_t cycles() const { return inputs.cycles; }
  ScheduledPulse pulse(std::uint64_t i) const;

  // Lazily generated: 4N entries.
  auto schedule() const {
    return std::views::iota(std::uint64_t{0}, 4 * inputs.cycles) |
           std::views::transform([this](std::uint64_t i) { return pulse(i); });
  }
};

PulsePlan make_plan(const PlanInputs& inputs, const units::PhysicalConstants& constants,
                    PlanOptions options = {});

// Natural units (ħ = m = ν = 1) with κ = X·x0 chosen directly, where
// X = t_p Δk Ω₁ Ω₂ / Δ. Used by the Fock-space oracles.
PulsePlan natural_plan(double kappa, double beta, std::uint64_t cycles,
                       PlanOptions options = {});

// --- Effective Hamiltonians and propagators --------------------------------

struct EffectiveOptions {
  bool lamb_dicke = true;
  DetuningModel detuning_model = DetuningModel::exact;
};

// H_eff for pulse i acting on the motional space (the |g><g| projector is
// carried as a scalar). Throws DomainError when t_i·ν ≠ iπ/2.
FockOperator effective_hamiltonian(std::uint64_t i, double t_i, const FockOperator& x_op,
                                   const LaserConfig& laser,
                                   const units::OscillatorScales& scales,
                                   EffectiveOptions options = {});

enum class Generator { plus_x, minus_p, minus_x, plus_p };

struct AnalyticPulse {
  Generator generator = Generator::plus_x;
  double strength = 0.0;               // ηt_p for x, (η/mν)t_p for p
  double beta_phase_increment = 0.0;   // i·β·ξ̃·t_p⁴
};

AnalyticPulse propagator_analytic(std::uint64_t i, const LaserConfig& laser,
                                  const gup::GupParams& gup,
                                  const units::OscillatorScales& scales);

// e^{±i·strength·(x or p)} e^{i·increment} realized on the truncated basis.
UnitaryOperator analytic_unitary(const AnalyticPulse& pulse,
                                 const units::OscillatorScales& scales, Index dim);

// Brute-force propagation: each pulse is exp(−i H_eff(t_i) t_p / ħ).
class NumericOracle {
 public:
  NumericOracle(const PulsePlan& plan, Index dim);

  UnitaryOperator pulse(std::uint64_t i) const;
  // U_{4c−1} ··· U_1 U_0 for c cycles.
  UnitaryOperator run(std::uint64_t cycles) const;
  FockOperator x_at_pulse(std::uint64_t i) const;
  Index dim() const { return dim_; }

 private:
  PulsePlan plan_;
  Index dim_;
  std::optional<gup::HeisenbergEvolver> evolver_;
};

UnitaryOperator propagator_numeric(std::uint64_t i, const PulsePlan& plan, Index dim);

// Coherent state |α> on the truncated basis, renormalized.
Eigen::VectorXcd coherent_state(fock::Complex alpha, Index dim);

struct NumericBetaPhase {
  double phase = 0.0;          // unwrapped arg<α|U(β)|α> − arg<α|U(0)|α>
  double amplitude = 0.0;      // |<α|U(β)|α>|
  int continuation_steps = 0;  // β grid used for unwrapping
};

// Per-run β-phase from brute-force propagation, unwrapped by continuation in β.
// continuation_steps = 0 picks the grid from the closed-form prediction and
// refines it while any step jumps by more than π/2.
NumericBetaPhase numeric_beta_phase(const PulsePlan& plan, Index dim,
                                    fock::Complex alpha = {0.0, 0.0},
                                    int continuation_steps = 0);

// Same for every cycle count 1..plan.cycles(); entry n−1 belongs to n cycles.
// The n-cycle propagators are prefixes of the longest run, so one pass suffices.
std::vector<NumericBetaPhase> numeric_beta_phase_series(const PulsePlan& plan, Index dim,
                                                        fock::Complex alpha = {0.0, 0.0},
                                                        int continuation_steps = 0);

// --- Closed-form phases ------------------------------------------------------

// Extended-precision scalars of a plan; every input enters via its decimal text.
struct ExactScalars {
  BigFloat hbar, mass, trap_freq, pulse_duration, rabi1, rabi2, detuning, delta_k, beta;
  // X = t_p Δk Ω₁ Ω₂ / Δ.
  BigFloat x_factor() const;
};
ExactScalars exact_scalars(const PulsePlan& plan, unsigned precision_bits);

struct CyclePhase {
  BigFloat phi0_cycle;        // −(ħ/4mν) X²
  BigFloat beta_tolerance_d;  // β ξ̃ t_p⁴
};

CyclePhase cycle_phase(const PulsePlan& plan, unsigned precision_bits = units::kDefaultPrecisionBits);
CyclePhase cycle_phase(const LaserConfig& laser, const gup::GupParams& gup,
                       const units::OscillatorScales& scales,
                       unsigned precision_bits = units::kDefaultPrecisionBits);

// Σ_{i=0}^{4N−1} i, and 2N(4N−1); equal for every N (checked in integer arithmetic).
unsigned __int128 progression_sum(std::uint64_t cycles);
unsigned __int128 progression_closed_form(std::uint64_t cycles);

struct PhaseResult {
  units::BigAngle phi0_unwrapped;
  units::BigAngle dphi_unwrapped;
  units::WrappedAngle phi0_wrapped;
  units::WrappedAngle dphi_wrapped;
  units::WrappedAngle phi_wrapped;
  std::array<double, 4> first_cycle_increments{};  // i·βξ̃t_p⁴, i = 0..3
  BigFloat beta_tolerance_d;
  double eta = 0.0;
  double xi_tilde = 0.0;
  double kappa = 0.0;
  double omega_tilde_relative_difference = 0.0;  // (Ω̃_exact − Ω̃_simplified)/Ω̃_simplified
  double harmonic_drift = 0.0;                   // ν t_p
  std::uint64_t cycles = 0;
  unsigned precision_bits = 0;
};

PhaseResult total_phase(const PulsePlan& plan,
                        unsigned precision_bits = units::kDefaultPrecisionBits);

}  // namespace gupsim::protocol
