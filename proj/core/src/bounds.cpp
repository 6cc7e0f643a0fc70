#include "gupsim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/core.h>

#include "gupsim/error.hpp"
#include "json_util.hpp"

namespace gupsim::bounds {

using units::BigFloat;

namespace {

constexpr double kPi = std::numbers::pi;

std::string sci(double v, int digits = 3) { return fmt::format("{:.{}e}", v, digits); }

}  // namespace

// ---------------------------------------------------------------------------
// Species and catalog

void SpeciesSpec::validate() const {
  const auto positive = [&](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError("species " + name + ": " + field + " must be positive");
    }
  };
  positive(wavelength_nm, "wavelength_nm");
  if (k_over_2pi) positive(*k_over_2pi, "k_over_2pi_per_m");
  if (cycles == 0) throw DomainError("species " + name + ": cycles must be positive");
  positive(trap_freq_over_2pi, "trap_freq_over_2pi_hz");
  positive(dk_over_k, "dk_over_k");
  if (dk_over_k > 2.0) {
    throw DomainError("species " + name + ": dk_over_k above 2 is not reachable with two beam pairs");
  }
  positive(mass_u, "mass_u");
  positive(claimed_bound, "claimed_bound");
  positive(pulse_duration, "pulse_duration_s");
  positive(rabi1, "rabi1_rad_per_s");
  positive(rabi2, "rabi2_rad_per_s");
  positive(detuning, "detuning_rad_per_s");
}

protocol::PlanInputs SpeciesSpec::plan_inputs(double beta0) const {
  protocol::PlanInputs in;
  in.mass_u = mass_u;
  in.trap_freq_hz = trap_freq_over_2pi;
  in.pulse_duration = pulse_duration;
  in.rabi1 = rabi1;
  in.rabi2 = rabi2;
  in.detuning = detuning;
  in.wavelength = wavelength_nm * 1e-9;
  in.k_over_2pi = k_over_2pi;
  in.dk_over_k = dk_over_k;
  in.cycles = cycles;
  in.beta0 = beta0;
  return in;
}

const SpeciesSpec& Catalog::find(std::string_view name) const {
  for (const SpeciesSpec& s : species) {
    if (s.name == name) return s;
  }
  std::string known;
  for (const SpeciesSpec& s : species) known += (known.empty() ? "" : ", ") + s.name;
  throw ConfigError("species", "unknown species '" + std::string(name) + "' (catalog " + source +
                                   " has: " + known + ")");
}

Catalog parse_catalog(std::string_view json_text, std::string source) {
  detail::Json root;
  try {
    root = detail::Json::parse(json_text);
  } catch (const detail::Json::parse_error& e) {
    throw ConfigError("", "catalog " + source + " is not valid JSON: " + e.what());
  }
  detail::StrictObject top(root, "");
  if (top.string("format") != "gupsim-species-catalog") {
    throw ConfigError("format", "not a gupsim species catalog");
  }
  Catalog cat;
  cat.source = std::move(source);
  cat.version = static_cast<int>(top.count("version"));
  if (cat.version != 1) {
    throw ConfigError("version", "unsupported catalog version " + std::to_string(cat.version));
  }
  top.skip("notes");

  detail::StrictObject text(top.raw("text_parameters"), "text_parameters");
  const double mass_u = text.positive("mass_u");
  const double tp = text.positive("pulse_duration_s");
  const double rabi1 = text.positive("rabi1_rad_per_s");
  const double rabi2 = text.positive("rabi2_rad_per_s");
  const double detuning = text.positive("detuning_rad_per_s");
  cat.reference_beta0 = text.positive("reference_beta0");
  text.finish();

  const detail::Json& rows = top.raw("species");
  if (!rows.is_array()) throw ConfigError("species", "expected an array");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string path = "species[" + std::to_string(i) + "]";
    detail::StrictObject row(rows[i], path);
    SpeciesSpec s;
    s.name = row.string("name");
    s.ion = row.string("ion");
    s.wavelength_nm = row.positive("wavelength_nm");
    s.k_over_2pi = row.optional_number("k_over_2pi_per_m");
    s.cycles = row.count("cycles");
    s.trap_freq_over_2pi = row.positive("trap_freq_over_2pi_hz");
    s.dk_over_k = row.positive("dk_over_k");
    s.mass_u = row.has("mass_u") ? row.positive("mass_u") : (row.skip("mass_u"), mass_u);
    detail::StrictObject levels(row.raw("levels"), path + ".levels");
    s.level_labels = {levels.string("e"), levels.string("g"), levels.string("r")};
    levels.finish();
    s.claimed_bound = row.positive("claimed_bound");
    s.phi0_claim = row.boolean("phi0_multiple_of_2pi_claim", false);
    s.isotope_mass_u = row.optional_number("isotope_mass_u");
    if (row.has("reference_phases")) {
      detail::StrictObject ref(row.raw("reference_phases"), path + ".reference_phases");
      s.reference = ReferencePhases{ref.number("phi_over_pi"), ref.number("dphi_over_pi")};
      ref.finish();
    } else {
      row.skip("reference_phases");
    }
    row.finish();
    s.pulse_duration = tp;
    s.rabi1 = rabi1;
    s.rabi2 = rabi2;
    s.detuning = detuning;
    try {
      s.validate();
    } catch (const DomainError& e) {
      throw ConfigError(path, e.what());
    }
    for (const SpeciesSpec& other : cat.species) {
      if (other.name == s.name) throw ConfigError(path + ".name", "duplicate species " + s.name);
    }
    cat.species.push_back(std::move(s));
  }
  top.finish();
  return cat;
}

Catalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("", "cannot read species catalog " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_catalog(buf.str(), path.string());
}

std::filesystem::path default_catalog_path() {
  if (const char* env = std::getenv("GUPSIM_CATALOG"); env != nullptr && *env != '\0') {
    return env;
  }
  const std::filesystem::path build_tree = GUPSIM_DEFAULT_CATALOG;
  std::error_code ec;
  if (std::filesystem::exists(build_tree, ec)) return build_tree;
  return GUPSIM_INSTALLED_CATALOG;
}

Catalog load_default_catalog() { return load_catalog(default_catalog_path()); }

// ---------------------------------------------------------------------------
// Readout

double readout_population(double phi) {
  const double s = std::sin(phi / 2.0);
  return s * s;
}

double delta_population(double phi0, double dphi) {
  return std::sin(dphi / 2.0) * std::sin(phi0 + dphi / 2.0);
}

std::string_view to_string(Regime r) { return r == Regime::linear ? "linear" : "quadratic"; }

bool within_one_decade(double value, double claimed) {
  return value > 0.0 && claimed > 0.0 && std::abs(std::log10(value / claimed)) <= 1.0;
}

// ---------------------------------------------------------------------------
// Bound solver

namespace {

// Smallest δ > 0 with cos(φ₀ + δ) = cos φ₀ ∓ 2ε, i.e. |δP_r| = ε.
BigFloat closed_form_delta(const BigFloat& phi0, double eps, unsigned bits) {
  const BigFloat two_pi = BigFloat::pi(bits) * BigFloat(2.0, bits);
  const BigFloat c0 = phi0.cos();
  const BigFloat one(1.0, bits);
  std::optional<BigFloat> best;
  for (const double sign : {-1.0, 1.0}) {
    const BigFloat target = c0 + BigFloat(sign * 2.0 * eps, bits);
    if (target.abs() > one) continue;
    const BigFloat theta = target.acos();
    for (const BigFloat& base : {theta, -theta}) {
      BigFloat d = base - phi0;
      // Into (0, 2π].
      const BigFloat turns = (d / two_pi).rounded_to_integer();
      d -= turns * two_pi;
      if (d.sign() <= 0) d += two_pi;
      if (!best || d < *best) best = d;
    }
  }
  if (!best) {
    throw DomainError("bound: accuracy unreachable for this phi0");
  }
  return *best;
}

// Geometric scan for the first |δP_r| ≥ ε, then bisection.
double bisection_delta(double phi0, double eps) {
  const auto f = [&](double d) { return std::abs(delta_population(phi0, d)) - eps; };
  double lo = 0.0;
  double hi = eps * 1e-3;
  while (f(hi) < 0.0) {
    lo = hi;
    hi = std::min(2.0 * hi, hi + kPi / 64.0);
    if (hi > 4.0 * kPi) {
      throw ConvergenceError("bound: no crossing of the accuracy level found");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double one_significant_figure(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return v;
  int e = static_cast<int>(std::floor(std::log10(v)));
  double m = std::round(v / std::pow(10.0, e));
  if (m >= 10.0) {
    m = 1.0;
    ++e;
  }
  return m * std::pow(10.0, e);
}

struct PlanPhases {
  BigFloat phi0_wrapped;
  double dphi_per_beta0 = 0.0;
};

PlanPhases plan_phases(const protocol::PulsePlan& plan, unsigned bits) {
  protocol::PlanInputs in = plan.inputs;
  in.beta0 = 1.0;
  const protocol::PulsePlan unit = protocol::make_plan(in, plan.constants, plan.options);
  const protocol::PhaseResult r = protocol::total_phase(unit, bits);
  return PlanPhases{r.phi0_wrapped.value, r.dphi_unwrapped.value().to_double()};
}

std::vector<SensitivityRow> bound_sensitivity(const protocol::PulsePlan& plan, double accuracy,
                                              const BoundOptions& options) {
  BoundOptions inner = options;
  inner.sensitivity = false;
  struct Knob {
    const char* name;
    void (*apply)(protocol::PlanInputs&, double);
  };
  static const Knob knobs[] = {
      {"mass_u", [](protocol::PlanInputs& in, double f) { in.mass_u *= f; }},
      {"trap_freq_over_2pi", [](protocol::PlanInputs& in, double f) { in.trap_freq_hz *= f; }},
      {"pulse_duration", [](protocol::PlanInputs& in, double f) { in.pulse_duration *= f; }},
      {"rabi1", [](protocol::PlanInputs& in, double f) { in.rabi1 *= f; }},
      {"rabi2", [](protocol::PlanInputs& in, double f) { in.rabi2 *= f; }},
      {"detuning", [](protocol::PlanInputs& in, double f) { in.detuning *= f; }},
      {"k_magnitude",
       [](protocol::PlanInputs& in, double f) {
         in.k_over_2pi = in.k_magnitude() / (2.0 * kPi) * f;
       }},
      {"dk_over_k", [](protocol::PlanInputs& in, double f) { in.dk_over_k *= f; }},
      {"cycles",
       [](protocol::PlanInputs& in, double f) {
         in.cycles = static_cast<std::uint64_t>(std::llround(static_cast<double>(in.cycles) * f));
       }},
  };
  std::vector<SensitivityRow> rows;
  for (const Knob& k : knobs) {
    SensitivityRow row{k.name, 0.0, 0.0};
    for (const double f : {0.99, 1.01}) {
      protocol::PlanInputs in = plan.inputs;
      k.apply(in, f);
      const protocol::PulsePlan p = protocol::make_plan(in, plan.constants, plan.options);
      const double b = solve_beta0_bound(p, accuracy, inner).beta0_bound;
      (f < 1.0 ? row.bound_minus : row.bound_plus) = b;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

BoundReport solve_beta0_bound(const protocol::PulsePlan& plan, double accuracy,
                              const BoundOptions& options) {
  if (!(accuracy > 0.0) || !(accuracy < 1.0)) {
    throw DomainError("bound: accuracy must lie in (0, 1)");
  }
  const unsigned bits = options.precision_bits;
  const PlanPhases phases = plan_phases(plan, bits);
  if (!(phases.dphi_per_beta0 > 0.0)) {
    throw DomainError("bound: the beta phase vanishes for this plan (zero cycles or zero coupling)");
  }

  BoundReport r;
  r.accuracy = accuracy;
  r.phi0_computed = phases.phi0_wrapped.to_double();
  r.phi0_overridden = options.phi0_override.has_value();
  const BigFloat phi0 =
      options.phi0_override ? BigFloat(*options.phi0_override, bits) : phases.phi0_wrapped;
  r.phi0_wrapped = phi0.to_double();
  r.dphi_per_beta0 = phases.dphi_per_beta0;

  const double delta_closed = closed_form_delta(phi0, accuracy, bits).to_double();
  const double delta_bisect = bisection_delta(r.phi0_wrapped, accuracy);
  r.closed_form_bound = delta_closed / r.dphi_per_beta0;
  r.bisection_bound = delta_bisect / r.dphi_per_beta0;
  r.method_relative_difference =
      std::abs(r.closed_form_bound - r.bisection_bound) / r.closed_form_bound;

  r.beta0_bound = r.closed_form_bound;
  r.beta0_bound_headline = one_significant_figure(r.beta0_bound);
  r.dphi_at_bound = delta_closed;
  r.delta_population_at_bound = delta_population(r.phi0_wrapped, r.beta0_bound * r.dphi_per_beta0);
  r.roundtrip_relative_error = std::abs(std::abs(r.delta_population_at_bound) - accuracy) / accuracy;

  const double half = delta_closed / 2.0;
  r.regime = std::abs(half * std::sin(r.phi0_wrapped)) >= std::abs(half * half * std::cos(r.phi0_wrapped))
                 ? Regime::linear
                 : Regime::quadratic;
  r.wrap_limited = delta_closed > kPi / 4.0;
  if (r.wrap_limited) {
    r.discrepancy_notes.push_back("beta phase at the bound is " + sci(delta_closed) +
                                  " rad > pi/4; the first crossing is reported");
  }
  if (options.sensitivity) {
    r.sensitivity = bound_sensitivity(plan, accuracy, options);
  }
  return r;
}

namespace {

protocol::PulsePlan species_plan(const SpeciesSpec& spec, const units::PhysicalConstants& constants) {
  return protocol::make_plan(spec.plan_inputs(1.0), constants);
}

std::vector<std::pair<std::string, BoundReport>> species_alternatives(
    const SpeciesSpec& spec, double accuracy, const units::PhysicalConstants& constants,
    const BoundOptions& headline) {
  std::vector<std::pair<std::string, BoundReport>> out;
  BoundOptions quiet = headline;
  quiet.sensitivity = false;
  if (spec.phi0_claim) {
    BoundOptions computed = quiet;
    computed.phi0_override.reset();
    out.emplace_back("phi0 computed from the listed parameters (no 2 pi m claim)",
                     solve_beta0_bound(species_plan(spec, constants), accuracy, computed));
  }
  if (spec.isotope_mass_u && std::abs(*spec.isotope_mass_u - spec.mass_u) > 0.5) {
    SpeciesSpec iso = spec;
    iso.mass_u = *spec.isotope_mass_u;
    out.emplace_back(fmt::format("isotope mass {} u instead of the inherited {} u",
                                 *spec.isotope_mass_u, spec.mass_u),
                     solve_beta0_bound(species_plan(iso, constants), accuracy, quiet));
  }
  if (spec.k_over_2pi) {
    SpeciesSpec wl = spec;
    wl.k_over_2pi.reset();
    out.emplace_back(fmt::format("|k| = 2 pi / lambda with lambda = {} nm", spec.wavelength_nm),
                     solve_beta0_bound(species_plan(wl, constants), accuracy, quiet));
  }
  for (auto& [label, rep] : out) rep.species = spec.name;
  return out;
}

}  // namespace

BoundReport solve_beta0_bound(const SpeciesSpec& spec, double accuracy,
                              const units::PhysicalConstants& constants,
                              const BoundOptions& options) {
  spec.validate();
  BoundOptions opts = options;
  if (spec.phi0_claim && !opts.phi0_override) opts.phi0_override = 0.0;
  BoundReport r = solve_beta0_bound(species_plan(spec, constants), accuracy, opts);
  r.species = spec.name;
  if (spec.phi0_claim) {
    r.discrepancy_notes.push_back(
        "phi0 taken as a multiple of 2 pi per the species claim; the listed parameters give "
        "wrapped phi0 = " + sci(r.phi0_computed, 6) + " rad");
  }
  for (const auto& [label, alt] : species_alternatives(spec, accuracy, constants, opts)) {
    r.discrepancy_notes.push_back("alternative (" + label + "): bound " + sci(alt.beta0_bound) +
                                  ", regime " + std::string(to_string(alt.regime)));
  }
  return r;
}

std::vector<Table1Row> table1(const Catalog& catalog, double accuracy,
                              const units::PhysicalConstants& constants) {
  std::vector<Table1Row> rows;
  for (const SpeciesSpec& spec : catalog.species) {
    Table1Row row;
    row.spec = spec;
    BoundOptions opts;
    if (spec.phi0_claim) opts.phi0_override = 0.0;
    row.report = solve_beta0_bound(spec, accuracy, constants, opts);
    row.agreement = within_one_decade(row.report.beta0_bound, spec.claimed_bound);
    if (!row.agreement) {
      row.report.discrepancy_notes.push_back(
          "computed bound " + sci(row.report.beta0_bound) + " is more than one decade from the "
          "quoted " + sci(spec.claimed_bound, 0));
    }
    row.alternatives = species_alternatives(spec, accuracy, constants, opts);
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Phase sensitivity to the constants

namespace {

struct Phases {
  BigFloat phi;
  BigFloat dphi;
};

// φ = φ₀ + δφ straight from the scalars, independent of total_phase.
Phases phases_from(const protocol::ExactScalars& s, std::uint64_t cycles, unsigned bits) {
  const BigFloat n(static_cast<std::int64_t>(cycles), bits);
  const BigFloat x = s.x_factor();
  const BigFloat m_nu = s.mass * s.trap_freq;
  const BigFloat phi0 = -(n * s.hbar * x * x) / (BigFloat(4.0, bits) * m_nu);
  const BigFloat dphi = BigFloat(2.0, bits) * n * (BigFloat(4.0, bits) * n - BigFloat(1.0, bits)) *
                        s.beta * s.hbar.pow(3) * BigFloat::pi(bits) * x.pow(4) /
                        (BigFloat(256.0, bits) * m_nu);
  return Phases{phi0 + dphi, dphi};
}

double wrap_double(double a) { return std::remainder(a, 2.0 * kPi); }

}  // namespace

PhaseSensitivity phase_sensitivity(const protocol::PulsePlan& plan,
                                   const std::optional<ReferencePhases>& reference,
                                   unsigned bits) {
  const protocol::PhaseResult result = protocol::total_phase(plan, bits);
  const double phi0 = result.phi0_unwrapped.value().to_double();
  const double dphi = result.dphi_unwrapped.value().to_double();

  PhaseSensitivity out;
  out.phi_wrapped = result.phi_wrapped.radians;
  out.dphi_wrapped = result.dphi_wrapped.radians;
  out.reference = reference;
  if (reference) {
    out.phi_distance = std::abs(wrap_double(reference->phi_over_pi * kPi - out.phi_wrapped));
    out.dphi_distance = std::abs(wrap_double(reference->dphi_over_pi * kPi - out.dphi_wrapped));
  }

  const units::ConstantUncertainties sigma = units::pinned_uncertainties();
  const protocol::ExactScalars base = protocol::exact_scalars(plan, bits);
  const Phases p0 = phases_from(base, plan.cycles(), bits);
  const BigFloat h(std::ldexp(1.0, -100), bits);
  const BigFloat one_plus_h = BigFloat(1.0, bits) + h;

  struct Entry {
    const char* name;
    double sigma;
    double dphi_dlog;
    double ddphi_dlog;
    void (*perturb)(protocol::ExactScalars&, const BigFloat&);
  };
  const Entry entries[] = {
      {"hbar", sigma.hbar, phi0 + 3.0 * dphi, 3.0 * dphi,
       [](protocol::ExactScalars& s, const BigFloat& f) {
         s.hbar *= f;
       }},
      {"c", sigma.c, -2.0 * dphi, -2.0 * dphi,
       [](protocol::ExactScalars& s, const BigFloat& f) { s.beta /= f * f; }},
      {"planck_mass", sigma.planck_mass, -2.0 * dphi, -2.0 * dphi,
       [](protocol::ExactScalars& s, const BigFloat& f) { s.beta /= f * f; }},
      {"atomic_mass_unit", sigma.atomic_mass_unit, -(phi0 + dphi), -dphi,
       [](protocol::ExactScalars& s, const BigFloat& f) { s.mass *= f; }},
  };

  double var_phi = 0.0;
  double var_dphi = 0.0;
  for (const Entry& e : entries) {
    ConstantSensitivity row;
    row.constant = e.name;
    row.relative_uncertainty = e.sigma;
    row.dphi_dlog = e.dphi_dlog;
    row.ddphi_dlog = e.ddphi_dlog;
    protocol::ExactScalars s = base;
    e.perturb(s, one_plus_h);
    const Phases p1 = phases_from(s, plan.cycles(), bits);
    row.dphi_dlog_numeric = ((p1.phi - p0.phi) / h).to_double();
    row.phase_uncertainty = std::abs(e.dphi_dlog) * e.sigma;
    var_phi += row.phase_uncertainty * row.phase_uncertainty;
    var_dphi += (e.ddphi_dlog * e.sigma) * (e.ddphi_dlog * e.sigma);
    if (reference) {
      const double to_phi = wrap_double(reference->phi_over_pi * kPi - out.phi_wrapped);
      const double to_dphi = wrap_double(reference->dphi_over_pi * kPi - out.dphi_wrapped);
      row.needed_for_phi = to_phi / e.dphi_dlog;
      row.needed_for_dphi = to_dphi / e.ddphi_dlog;
      row.reachable = std::abs(*row.needed_for_phi) <= e.sigma &&
                      std::abs(*row.needed_for_dphi) <= e.sigma;
    }
    out.rows.push_back(std::move(row));
  }
  out.combined_phi_uncertainty = std::sqrt(var_phi);
  out.combined_dphi_uncertainty = std::sqrt(var_dphi);
  if (reference) {
    out.phi_reachable = out.phi_distance <= out.combined_phi_uncertainty;
    out.dphi_reachable = out.dphi_distance <= out.combined_dphi_uncertainty;
  }
  return out;
}

}  // namespace gupsim::bounds
