#include "gupsim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gupsim/error.hpp"

namespace gupsim::protocol {

using fock::Complex;
using fock::Matrix;

namespace {

constexpr double kPi = std::numbers::pi;

bool finite_all(const std::array<double, 4>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::string int128_to_string(unsigned __int128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return {out.rbegin(), out.rend()};
}

// cos(νt_i), sin(νt_i) and e^{−iνt_i} at exact quarter turns.
int quarter_cos(std::uint64_t i) {
  static constexpr int table[4] = {1, 0, -1, 0};
  return table[i % 4];
}
int quarter_sin(std::uint64_t i) {
  static constexpr int table[4] = {0, 1, 0, -1};
  return table[i % 4];
}
Complex quarter_rotation_conj(std::uint64_t i) {
  static const Complex table[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  return table[i % 4];
}

}  // namespace

// ---------------------------------------------------------------------------
// Laser configuration

double LaserConfig::delta_k() const { return k_proj[3] + k_proj[1] - k_proj[2] - k_proj[0]; }

LaserConfig LaserConfig::symmetric(double rabi1, double rabi2, double detuning,
                                   double delta_k, double pulse_duration, double wavelength) {
  LaserConfig cfg;
  cfg.rabi = {rabi1, rabi2, rabi1, rabi2};
  cfg.detuning = detuning;
  const double q = delta_k / 4.0;
  cfg.k_proj = {-q, q, -q, q};
  cfg.phases = {0.0, 0.0, 0.0, 0.0};
  cfg.pulse_duration = pulse_duration;
  cfg.wavelength = wavelength;
  return cfg;
}

void LaserConfig::validate() const {
  if (!finite_all(rabi) || !finite_all(k_proj) || !finite_all(phases) ||
      !std::isfinite(detuning) || !std::isfinite(pulse_duration)) {
    throw DomainError("LaserConfig: non-finite field");
  }
  if (rabi[0] != rabi[2] || rabi[1] != rabi[3]) {
    throw DomainError("LaserConfig: require Omega1 = Omega3 and Omega2 = Omega4");
  }
  if (!(pulse_duration > 0.0)) {
    throw DomainError("LaserConfig: pulse duration must be positive");
  }
}

std::vector<std::string> laser_warnings(const LaserConfig& laser, double trap_freq) {
  std::vector<std::string> out;
  const double drift = laser.pulse_duration * trap_freq;
  if (drift > kPulseDurationWarnThreshold) {
    out.push_back("pulse duration is not short against the trap period: t_p*nu = " +
                  std::to_string(drift) + " > " + std::to_string(kPulseDurationWarnThreshold) +
                  "; x(t) is frozen during each pulse");
  }
  return out;
}

PhaseSetting phase_settings(std::uint64_t i) {
  switch (i % 4) {
    case 0: return {kPi / 2, kPi / 2};
    case 1: return {0.0, 0.0};
    case 2: return {-kPi / 2, -kPi / 2};
    default: return {kPi, kPi};
  }
}

double eta(const LaserConfig& laser) {
  if (laser.detuning == 0.0) {
    throw DomainError("eta: zero detuning");
  }
  return laser.delta_k() * laser.rabi[0] * laser.rabi[1] / (2.0 * laser.detuning);
}

double xi_tilde(const LaserConfig& laser, const units::OscillatorScales& scales) {
  const double y = 2.0 * eta(laser);  // Δk Ω₁ Ω₂ / Δ
  const double h = scales.hbar;
  return h * h * h * kPi / (256.0 * scales.mass * scales.trap_freq) * std::pow(y, 4);
}

double omega_tilde(const LaserConfig& laser, const units::OscillatorScales& scales,
                   DetuningModel model) {
  if (laser.detuning == 0.0) {
    throw DomainError("omega_tilde: zero detuning");
  }
  const double o12 = scales.hbar * laser.rabi[0] * laser.rabi[1];
  if (model == DetuningModel::simplified) {
    return o12 / (4.0 * laser.detuning);
  }
  const double d1 = laser.detuning;
  const double d2 = laser.detuning + scales.trap_freq;
  return o12 * (d1 + d2) / (8.0 * d1 * d2);
}

// ---------------------------------------------------------------------------
// Plans

double PlanInputs::k_magnitude() const {
  if (k_over_2pi) return 2.0 * kPi * *k_over_2pi;
  if (wavelength) return 2.0 * kPi / *wavelength;
  throw DomainError("plan: neither wavelength nor k_over_2pi given");
}

units::BigAngle ScheduledPulse::phase_angle(unsigned precision_bits) const {
  return units::BigAngle::pi_multiple(static_cast<std::int64_t>(index), 2, precision_bits);
}

double ScheduledPulse::time(double trap_freq) const {
  return static_cast<double>(index) * (kPi / 2.0) / trap_freq;
}

ScheduledPulse PulsePlan::pulse(std::uint64_t i) const {
  if (i >= 4 * inputs.cycles) {
    throw DomainError("pulse index " + std::to_string(i) + " beyond schedule of " +
                      std::to_string(4 * inputs.cycles) + " pulses");
  }
  return ScheduledPulse{i, phase_settings(i)};
}

PulsePlan make_plan(const PlanInputs& inputs, const units::PhysicalConstants& constants,
                    PlanOptions options) {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string("plan: ") + name + " must be positive");
    }
  };
  positive(inputs.mass_u, "mass_u");
  positive(inputs.trap_freq_hz, "trap_freq_hz");
  positive(inputs.pulse_duration, "pulse_duration");
  positive(inputs.dk_over_k, "dk_over_k");
  if (inputs.wavelength) positive(*inputs.wavelength, "wavelength");
  if (inputs.k_over_2pi) positive(*inputs.k_over_2pi, "k_over_2pi");
  if (!(inputs.rabi1 >= 0.0) || !(inputs.rabi2 >= 0.0)) {
    throw DomainError("plan: Rabi frequencies must be non-negative");
  }
  if (inputs.detuning == 0.0 || !std::isfinite(inputs.detuning)) {
    throw DomainError("plan: detuning must be finite and non-zero");
  }

  PulsePlan plan;
  plan.inputs = inputs;
  plan.constants = constants;
  plan.options = options;
  const double mass = inputs.mass_u * constants.atomic_mass_unit;
  const double nu = 2.0 * kPi * inputs.trap_freq_hz;
  const double dk = inputs.dk_over_k * inputs.k_magnitude();
  const double lambda = inputs.k_over_2pi ? 1.0 / *inputs.k_over_2pi : *inputs.wavelength;
  plan.laser = LaserConfig::symmetric(inputs.rabi1, inputs.rabi2, inputs.detuning, dk,
                                      inputs.pulse_duration, lambda);
  plan.laser.validate();
  plan.gup = gup::make_gup_params(inputs.beta0, mass, nu, constants);
  plan.scales = units::oscillator_scales(mass, nu, constants);
  plan.warnings = laser_warnings(plan.laser, nu);
  return plan;
}

PulsePlan natural_plan(double kappa, double beta, std::uint64_t cycles, PlanOptions options) {
  const units::PhysicalConstants natural = units::PhysicalConstants::natural();
  PlanInputs in;
  in.mass_u = 1.0;
  in.trap_freq_hz = 1.0 / (2.0 * kPi);
  in.pulse_duration = 1e-3;
  in.rabi1 = 1e3;
  in.rabi2 = 1e3;
  in.detuning = 1e9;
  in.dk_over_k = 1.0;
  const double x0 = 1.0 / std::sqrt(2.0);
  const double x_factor = kappa / x0;
  const double dk = x_factor * in.detuning / (in.pulse_duration * in.rabi1 * in.rabi2);
  in.k_over_2pi = dk / (2.0 * kPi);
  in.cycles = cycles;
  in.beta0 = beta;
  return make_plan(in, natural, options);
}

// ---------------------------------------------------------------------------
// Effective Hamiltonians

FockOperator effective_hamiltonian(std::uint64_t i, double t_i, const FockOperator& x_op,
                                   const LaserConfig& laser,
                                   const units::OscillatorScales& scales,
                                   EffectiveOptions options) {
  const double expected = static_cast<double>(i) * kPi / 2.0;
  if (std::abs(t_i * scales.trap_freq - expected) > 1e-9 * std::max(1.0, expected)) {
    throw DomainError("effective_hamiltonian: time " + std::to_string(t_i) +
                      " does not match pulse index " + std::to_string(i));
  }
  const double omega = omega_tilde(laser, scales, options.detuning_model);
  if (options.lamb_dicke) {
    // −cos, +sin, +cos, −sin for i mod 4 = 0..3.
    static constexpr int sign[4] = {-1, 1, 1, -1};
    const int shape = (i % 2 == 0) ? quarter_cos(i) : quarter_sin(i);
    const double coeff = sign[i % 4] * shape * 2.0 * omega * laser.delta_k();
    return Complex(coeff, 0.0) * x_op;
  }
  const PhaseSetting setting = phase_settings(i);
  const double q1 = laser.k_proj[0] - laser.k_proj[1];
  const double q4 = laser.k_proj[3] - laser.k_proj[2];
  const Matrix e1 = fock::expm_i_hermitian(x_op, q1).matrix();
  const Matrix e4 = fock::expm_i_hermitian(x_op, q4).matrix();
  const Complex rot = quarter_rotation_conj(i);
  const Matrix m = (-std::polar(1.0, setting.d12) * e1 + std::polar(1.0, setting.d43) * e4) * rot;
  return FockOperator(Matrix(omega * (m + m.adjoint())));
}

AnalyticPulse propagator_analytic(std::uint64_t i, const LaserConfig& laser,
                                  const gup::GupParams& gup,
                                  const units::OscillatorScales& scales) {
  const double e = eta(laser);
  const double tp = laser.pulse_duration;
  const double x_strength = e * tp;
  const double p_strength = e / (scales.mass * scales.trap_freq) * tp;
  const double increment =
      static_cast<double>(i) * gup.beta * xi_tilde(laser, scales) * std::pow(tp, 4);
  switch (i % 4) {
    case 0: return {Generator::plus_x, x_strength, increment};
    case 1: return {Generator::minus_p, p_strength, increment};
    case 2: return {Generator::minus_x, x_strength, increment};
    default: return {Generator::plus_p, p_strength, increment};
  }
}

UnitaryOperator analytic_unitary(const AnalyticPulse& pulse,
                                 const units::OscillatorScales& scales, Index dim) {
  const fock::Quadratures q = fock::quadratures(dim, scales);
  double s = pulse.strength;
  const FockOperator* op = &q.x;
  switch (pulse.generator) {
    case Generator::plus_x: break;
    case Generator::minus_x: s = -s; break;
    case Generator::plus_p: op = &q.p; break;
    case Generator::minus_p: op = &q.p; s = -s; break;
  }
  const UnitaryOperator u = fock::expm_i_hermitian(*op, s);
  return UnitaryOperator(Matrix(std::polar(1.0, pulse.beta_phase_increment) * u.matrix()));
}

// ---------------------------------------------------------------------------
// Numeric oracle

NumericOracle::NumericOracle(const PulsePlan& plan, Index dim) : plan_(plan), dim_(dim) {
  if (dim < 2) {
    throw DomainError("NumericOracle: dimension must be at least 2");
  }
  if (plan_.options.x_source == XSource::numeric) {
    evolver_.emplace(plan_.gup, plan_.scales, dim);
  }
}

FockOperator NumericOracle::x_at_pulse(std::uint64_t i) const {
  const double t = plan_.pulse(i).time(plan_.scales.trap_freq);
  if (evolver_) {
    return evolver_->x_at(t);
  }
  return gup::x_heisenberg_analytic(t, plan_.gup, plan_.scales, dim_);
}

UnitaryOperator NumericOracle::pulse(std::uint64_t i) const {
  const double t = plan_.pulse(i).time(plan_.scales.trap_freq);
  const FockOperator h =
      effective_hamiltonian(i, t, x_at_pulse(i), plan_.laser, plan_.scales,
                            {plan_.options.lamb_dicke, plan_.options.detuning_model});
  return fock::expm_i_hermitian(h, -plan_.laser.pulse_duration / plan_.scales.hbar);
}

UnitaryOperator NumericOracle::run(std::uint64_t cycles) const {
  UnitaryOperator u = UnitaryOperator::identity(dim_);
  for (std::uint64_t i = 0; i < 4 * cycles; ++i) {
    u = pulse(i) * u;
  }
  return u;
}

UnitaryOperator propagator_numeric(std::uint64_t i, const PulsePlan& plan, Index dim) {
  return NumericOracle(plan, dim).pulse(i);
}

Eigen::VectorXcd coherent_state(Complex alpha, Index dim) {
  Eigen::VectorXcd v(dim);
  Complex c = std::exp(-0.5 * std::norm(alpha));
  for (Index n = 0; n < dim; ++n) {
    v(n) = c;
    c *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  return v / v.norm();
}

std::vector<NumericBetaPhase> numeric_beta_phase_series(const PulsePlan& plan, Index dim,
                                                        Complex alpha, int continuation_steps) {
  const std::uint64_t n_max = plan.cycles();
  if (n_max == 0) return {};
  const Eigen::VectorXcd psi = coherent_state(alpha, dim);

  // <α|U_n(β)|α> for n = 1..n_max from a single pass over 4·n_max pulses.
  const auto overlaps = [&](double beta0) {
    PlanInputs in = plan.inputs;
    in.beta0 = beta0;
    const NumericOracle oracle(make_plan(in, plan.constants, plan.options), dim);
    std::vector<Complex> out;
    Eigen::VectorXcd state = psi;
    for (std::uint64_t i = 0; i < 4 * n_max; ++i) {
      state = oracle.pulse(i).matrix() * state;
      if (i % 4 == 3) out.push_back(psi.dot(state));
    }
    return out;
  };
  const std::vector<Complex> reference = overlaps(0.0);

  int steps = continuation_steps;
  if (steps <= 0) {
    const double predicted = static_cast<double>(progression_closed_form(n_max)) *
                             plan.gup.beta * xi_tilde(plan.laser, plan.scales) *
                             std::pow(plan.laser.pulse_duration, 4);
    steps = std::max(1, static_cast<int>(std::ceil(std::abs(predicted) / (kPi / 2.0))));
  }
  while (true) {
    std::vector<NumericBetaPhase> out(n_max);
    std::vector<double> previous(n_max, 0.0);
    bool ambiguous = false;
    for (int k = 1; k <= steps; ++k) {
      const std::vector<Complex> z = overlaps(plan.inputs.beta0 * k / steps);
      for (std::uint64_t n = 0; n < n_max; ++n) {
        const double ph = std::arg(z[n] / reference[n]);
        const double jump = std::remainder(ph - previous[n], 2.0 * kPi);
        ambiguous = ambiguous || std::abs(jump) > kPi / 2.0;
        out[n].phase += jump;
        out[n].amplitude = std::abs(z[n]);
        out[n].continuation_steps = steps;
        previous[n] = ph;
      }
    }
    if (!ambiguous || continuation_steps > 0) return out;
    if (steps >= 512) {
      throw ConvergenceError("numeric_beta_phase: beta continuation did not resolve the phase branch");
    }
    steps *= 2;
  }
}

NumericBetaPhase numeric_beta_phase(const PulsePlan& plan, Index dim, Complex alpha,
                                    int continuation_steps) {
  if (plan.cycles() == 0) return {};
  return numeric_beta_phase_series(plan, dim, alpha, continuation_steps).back();
}

// ---------------------------------------------------------------------------
// Closed-form phases

BigFloat ExactScalars::x_factor() const {
  return pulse_duration * delta_k * rabi1 * rabi2 / detuning;
}

ExactScalars exact_scalars(const PulsePlan& plan, unsigned bits) {
  const auto dec = [bits](double v) { return BigFloat::from_double_decimal(v, bits); };
  const auto text = [bits](std::string_view s) { return BigFloat::from_decimal(s, bits); };
  const units::PhysicalConstants& k = plan.constants;
  const PlanInputs& in = plan.inputs;
  const BigFloat two_pi = BigFloat::pi(bits) * BigFloat(2.0, bits);
  const BigFloat k_mag = in.k_over_2pi ? two_pi * dec(*in.k_over_2pi) : two_pi / dec(*in.wavelength);
  const BigFloat momentum = text(k.planck_mass_text) * text(k.c_text);
  return ExactScalars{text(k.hbar_text),
                      dec(in.mass_u) * text(k.atomic_mass_unit_text),
                      two_pi * dec(in.trap_freq_hz),
                      dec(in.pulse_duration),
                      dec(in.rabi1),
                      dec(in.rabi2),
                      dec(in.detuning),
                      dec(in.dk_over_k) * k_mag,
                      dec(in.beta0) / (momentum * momentum)};
}

namespace {

CyclePhase cycle_from_scalars(const ExactScalars& s, unsigned bits) {
  const BigFloat x = s.x_factor();
  const BigFloat m_nu = s.mass * s.trap_freq;
  BigFloat phi0 = -(s.hbar * x * x) / (BigFloat(4.0, bits) * m_nu);

  // Same quantity through η = Δk Ω₁ Ω₂ / 2Δ: −ħ η² t_p² / (mν).
  const BigFloat eta = s.delta_k * s.rabi1 * s.rabi2 / (BigFloat(2.0, bits) * s.detuning);
  const BigFloat eta_tp = eta * s.pulse_duration;
  const BigFloat alt = -(s.hbar * eta_tp * eta_tp) / m_nu;
  const BigFloat tol = phi0.abs() * BigFloat(std::ldexp(1.0, 8 - static_cast<int>(bits)), bits);
  if ((phi0 - alt).abs() > tol) {
    throw Error("cycle_phase: X and eta forms of the ordinary phase disagree");
  }

  const BigFloat d = s.beta * s.hbar.pow(3) * BigFloat::pi(bits) * x.pow(4) /
                     (BigFloat(256.0, bits) * m_nu);
  return CyclePhase{std::move(phi0), d};
}

}  // namespace

CyclePhase cycle_phase(const PulsePlan& plan, unsigned precision_bits) {
  return cycle_from_scalars(exact_scalars(plan, precision_bits), precision_bits);
}

CyclePhase cycle_phase(const LaserConfig& laser, const gup::GupParams& gup,
                       const units::OscillatorScales& scales, unsigned bits) {
  gup::check_consistent(gup, scales);
  const auto dec = [bits](double v) { return BigFloat::from_double_decimal(v, bits); };
  const ExactScalars s{dec(scales.hbar),   dec(scales.mass),    dec(scales.trap_freq),
                       dec(laser.pulse_duration), dec(laser.rabi[0]), dec(laser.rabi[1]),
                       dec(laser.detuning), dec(laser.delta_k()), dec(gup.beta)};
  return cycle_from_scalars(s, bits);
}

unsigned __int128 progression_sum(std::uint64_t cycles) {
  const unsigned __int128 n = static_cast<unsigned __int128>(cycles) * 4;
  return n == 0 ? 0 : n * (n - 1) / 2;
}

unsigned __int128 progression_closed_form(std::uint64_t cycles) {
  if (cycles == 0) return 0;
  const unsigned __int128 n = cycles;
  return 2 * n * (4 * n - 1);
}

PhaseResult total_phase(const PulsePlan& plan, unsigned bits) {
  const ExactScalars s = exact_scalars(plan, bits);
  const CyclePhase cycle = cycle_from_scalars(s, bits);
  const std::uint64_t n = plan.cycles();
  if (n > static_cast<std::uint64_t>(INT64_MAX / 8)) {
    throw DomainError("total_phase: cycle count too large");
  }
  const BigFloat big_n(static_cast<std::int64_t>(n), bits);

  // φ₀ = −(Nħ/4mν) X²,  δφ = (4N−1)·2N·(βħ³π/256mν) X⁴.
  const BigFloat x = s.x_factor();
  const BigFloat m_nu = s.mass * s.trap_freq;
  BigFloat phi0 = -(big_n * s.hbar * x * x) / (BigFloat(4.0, bits) * m_nu);
  const BigFloat four_n_minus_1 = BigFloat(4.0, bits) * big_n - BigFloat(1.0, bits);
  BigFloat dphi = n == 0 ? BigFloat(bits)
                         : four_n_minus_1 * BigFloat(2.0, bits) * big_n * s.beta *
                               s.hbar.pow(3) * BigFloat::pi(bits) * x.pow(4) /
                               (BigFloat(256.0, bits) * m_nu);

  // δφ must equal the arithmetic progression Σ i·d over all 4N pulses.
  const unsigned __int128 terms = progression_closed_form(n);
  if (terms != progression_sum(n)) {
    throw Error("total_phase: progression identity failed");
  }
  const BigFloat by_progression =
      BigFloat::from_decimal(int128_to_string(terms), bits) * cycle.beta_tolerance_d;
  const BigFloat tol = dphi.abs() * BigFloat(std::ldexp(1.0, 8 - static_cast<int>(bits)), bits);
  if ((dphi - by_progression).abs() > tol) {
    throw Error("total_phase: closed form and progression sum of the beta phase disagree");
  }

  PhaseResult r;
  r.phi0_unwrapped = units::BigAngle(phi0);
  r.dphi_unwrapped = units::BigAngle(dphi);
  r.phi0_wrapped = units::wrap_phase(r.phi0_unwrapped);
  r.dphi_wrapped = units::wrap_phase(r.dphi_unwrapped);
  r.phi_wrapped = units::wrap_phase(r.phi0_unwrapped + r.dphi_unwrapped);
  const double d = cycle.beta_tolerance_d.to_double();
  for (int i = 0; i < 4; ++i) {
    r.first_cycle_increments[static_cast<std::size_t>(i)] = i * d;
  }
  r.beta_tolerance_d = cycle.beta_tolerance_d;
  r.eta = eta(plan.laser);
  r.xi_tilde = xi_tilde(plan.laser, plan.scales);
  r.kappa = (x * (s.hbar / (BigFloat(2.0, bits) * m_nu)).sqrt()).to_double();
  const double exact = omega_tilde(plan.laser, plan.scales, DetuningModel::exact);
  const double simple = omega_tilde(plan.laser, plan.scales, DetuningModel::simplified);
  r.omega_tilde_relative_difference = (exact - simple) / simple;
  r.harmonic_drift = plan.laser.pulse_duration * plan.scales.trap_freq;
  r.cycles = n;
  r.precision_bits = bits;
  return r;
}

}  // namespace gupsim::protocol
