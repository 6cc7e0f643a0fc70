#include "gupsim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "gupsim/error.hpp"
#include "gupsim/verify.hpp"
#include "json_util.hpp"
#include "report.hpp"

namespace gupsim::cli {

using detail::Json;
using detail::StrictObject;

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::phase: return "phase";
    case Mode::simulate: return "simulate";
    case Mode::verify: return "verify";
    case Mode::bound: return "bound";
    case Mode::table1: return "table1";
  }
  return "?";
}

namespace {

constexpr std::string_view kUser = "user";
constexpr std::string_view kDefault = "default";
constexpr std::string_view kCatalog = "catalog";

Mode parse_mode(const std::string& s, const std::string& path) {
  for (Mode m : {Mode::phase, Mode::simulate, Mode::verify, Mode::bound, Mode::table1}) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError(path, "unknown mode '" + s + "'");
}

Format parse_format(const std::string& s, const std::string& path) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  throw ConfigError(path, "expected \"json\" or \"csv\"");
}

PlanOverrides parse_overrides(const Json& j, const std::string& path) {
  StrictObject o(j, path);
  PlanOverrides r;
  r.mass_u = o.optional_number("mass_u");
  r.trap_freq_over_2pi_hz = o.optional_number("trap_freq_over_2pi_hz");
  r.pulse_duration_s = o.optional_number("pulse_duration_s");
  r.rabi1 = o.optional_number("rabi1_rad_per_s");
  r.rabi2 = o.optional_number("rabi2_rad_per_s");
  r.detuning = o.optional_number("detuning_rad_per_s");
  r.wavelength_nm = o.optional_number("wavelength_nm");
  r.k_over_2pi = o.optional_number("k_over_2pi_per_m");
  r.dk_over_k = o.optional_number("dk_over_k");
  if (o.has("cycles")) r.cycles = o.count("cycles");
  else o.skip("cycles");
  r.beta0 = o.optional_number("beta0");
  o.finish();
  return r;
}

ExplicitPlan parse_explicit(const Json& j, const std::string& path, std::optional<double>& beta0) {
  StrictObject o(j, path);
  ExplicitPlan p;
  const std::string units = o.string("units");
  if (units == "natural") {
    p.units = Units::natural;
    p.kappa = o.positive("kappa");
    p.beta = o.optional_number("beta").value_or(0.0);
    if (p.beta < 0.0) throw ConfigError(o.path("beta"), "must be non-negative");
    p.cycles = o.count("cycles");
  } else if (units == "SI") {
    p.units = Units::si;
    protocol::PlanInputs& in = p.si;
    in.mass_u = o.positive("mass_u");
    in.trap_freq_hz = o.positive("trap_freq_over_2pi_hz");
    in.pulse_duration = o.positive("pulse_duration_s");
    in.rabi1 = o.positive("rabi1_rad_per_s");
    in.rabi2 = o.positive("rabi2_rad_per_s");
    in.detuning = o.positive("detuning_rad_per_s");
    if (const auto wl = o.optional_number("wavelength_nm")) in.wavelength = *wl * 1e-9;
    in.k_over_2pi = o.optional_number("k_over_2pi_per_m");
    if (!in.wavelength && !in.k_over_2pi) {
      throw ConfigError(path, "give wavelength_nm or k_over_2pi_per_m");
    }
    in.dk_over_k = o.positive("dk_over_k");
    in.cycles = o.count("cycles");
    beta0 = o.optional_number("beta0");
  } else {
    throw ConfigError(o.path("units"), "expected \"SI\" or \"natural\"");
  }
  o.finish();
  return p;
}

protocol::PlanOptions parse_options(const Json& j, const std::string& path) {
  StrictObject o(j, path);
  protocol::PlanOptions r;
  if (const auto d = o.optional_string("detuning_model")) {
    if (*d == "exact") r.detuning_model = protocol::DetuningModel::exact;
    else if (*d == "simplified") r.detuning_model = protocol::DetuningModel::simplified;
    else throw ConfigError(o.path("detuning_model"), "expected \"exact\" or \"simplified\"");
  }
  r.lamb_dicke = o.boolean("lamb_dicke", true);
  if (const auto x = o.optional_string("x_source")) {
    if (*x == "analytic") r.x_source = protocol::XSource::analytic;
    else if (*x == "numeric") r.x_source = protocol::XSource::numeric;
    else throw ConfigError(o.path("x_source"), "expected \"analytic\" or \"numeric\"");
  }
  o.finish();
  return r;
}

void set_default_provenance(RunConfig& c) {
  for (const char* k : {"numeric.dim", "numeric.precision_bits", "numeric.accuracy",
                        "numeric.truncation_rel_tol", "numeric.closure_tol", "output.format"}) {
    c.settings_provenance.emplace(k, kDefault);
  }
}

void check_numeric(const NumericSettings& n) {
  if (n.dim < 8 || n.dim > 4096) throw ConfigError("numeric.dim", "must lie in [8, 4096]");
  if (n.precision_bits < 64 || n.precision_bits > 1u << 16) {
    throw ConfigError("numeric.precision_bits", "must lie in [64, 65536]");
  }
  if (!(n.accuracy > 0.0 && n.accuracy < 1.0)) {
    throw ConfigError("numeric.accuracy", "must lie in (0, 1)");
  }
  if (!(n.truncation_rel_tol > 0.0)) {
    throw ConfigError("numeric.truncation_rel_tol", "must be positive");
  }
  if (!(n.closure_tol > 0.0)) throw ConfigError("numeric.closure_tol", "must be positive");
}

}  // namespace

RunConfig parse_config(std::string_view json_text) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
  StrictObject top(root, "");
  RunConfig c;
  set_default_provenance(c);
  if (const auto m = top.optional_string("mode")) c.mode = parse_mode(*m, "mode");
  c.species = top.optional_string("species");
  std::optional<double> plan_beta0;
  if (top.has("plan")) c.plan = parse_explicit(top.raw("plan"), "plan", plan_beta0);
  else top.skip("plan");
  if (top.has("overrides")) {
    if (c.plan) throw ConfigError("overrides", "overrides apply to species plans only");
    c.overrides = parse_overrides(top.raw("overrides"), "overrides");
  } else {
    top.skip("overrides");
  }
  if (plan_beta0) c.overrides.beta0 = plan_beta0;
  if (top.has("options")) c.options = parse_options(top.raw("options"), "options");
  else top.skip("options");
  if (const auto cat = top.optional_string("catalog")) c.catalog = *cat;

  if (top.has("numeric")) {
    StrictObject n(top.raw("numeric"), "numeric");
    const auto mark = [&](const char* key) { c.settings_provenance[std::string("numeric.") + key] = kUser; };
    if (n.has("dim")) {
      c.numeric.dim = static_cast<fock::Index>(n.count("dim"));
      mark("dim");
    }
    if (n.has("precision_bits")) {
      c.numeric.precision_bits = static_cast<unsigned>(n.count("precision_bits"));
      mark("precision_bits");
    }
    for (auto [key, field] : {std::pair{"accuracy", &NumericSettings::accuracy},
                              std::pair{"truncation_rel_tol", &NumericSettings::truncation_rel_tol},
                              std::pair{"closure_tol", &NumericSettings::closure_tol}}) {
      if (const auto v = n.optional_number(key)) {
        c.numeric.*field = *v;
        mark(key);
      }
    }
    n.finish();
  } else {
    top.skip("numeric");
  }

  if (top.has("output")) {
    StrictObject o(top.raw("output"), "output");
    if (const auto p = o.optional_string("path")) c.output = *p;
    if (const auto f = o.optional_string("format")) {
      c.format = parse_format(*f, "output.format");
      c.settings_provenance["output.format"] = kUser;
    }
    o.finish();
  } else {
    top.skip("output");
  }
  c.quick = top.boolean("quick", false);
  top.finish();

  if (c.species && c.plan) throw ConfigError("plan", "give either species or plan, not both");
  check_numeric(c.numeric);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ResolvedPlan resolve_plan(const RunConfig& c) {
  ResolvedPlan r;
  if (c.plan) {
    const ExplicitPlan& p = *c.plan;
    if (p.units == Units::natural) {
      if (c.overrides.beta0) {
        throw ConfigError("beta0", "natural-unit plans take plan.beta instead of beta0");
      }
      r.plan = protocol::natural_plan(p.kappa, p.beta, c.overrides.cycles.value_or(p.cycles),
                                      c.options);
      for (const char* k : {"kappa", "beta", "cycles"}) r.provenance[k] = kUser;
      return r;
    }
    protocol::PlanInputs in = p.si;
    if (c.overrides.cycles) in.cycles = *c.overrides.cycles;
    in.beta0 = c.overrides.beta0.value_or(0.0);
    for (const char* k : {"mass_u", "trap_freq_over_2pi_hz", "pulse_duration_s", "rabi1_rad_per_s",
                          "rabi2_rad_per_s", "detuning_rad_per_s", "wave_vector", "dk_over_k",
                          "cycles"}) {
      r.provenance[k] = kUser;
    }
    r.provenance["beta0"] = c.overrides.beta0 ? kUser : kDefault;
    r.plan = protocol::make_plan(in, units::pinned_constants(), c.options);
    return r;
  }
  if (!c.species) {
    throw ConfigError("species", "no plan source: give --species, or species or plan in --config");
  }

  const bounds::Catalog cat = c.catalog ? bounds::load_catalog(*c.catalog)
                                        : bounds::load_default_catalog();
  bounds::SpeciesSpec s = cat.find(*c.species);
  const PlanOverrides& o = c.overrides;
  const auto apply = [&](const std::optional<double>& v, double& field, const char* key) {
    if (v) field = *v;
    r.provenance[key] = v ? kUser : kCatalog;
  };
  apply(o.mass_u, s.mass_u, "mass_u");
  apply(o.trap_freq_over_2pi_hz, s.trap_freq_over_2pi, "trap_freq_over_2pi_hz");
  apply(o.pulse_duration_s, s.pulse_duration, "pulse_duration_s");
  apply(o.rabi1, s.rabi1, "rabi1_rad_per_s");
  apply(o.rabi2, s.rabi2, "rabi2_rad_per_s");
  apply(o.detuning, s.detuning, "detuning_rad_per_s");
  apply(o.dk_over_k, s.dk_over_k, "dk_over_k");
  // A wavelength override alone means |k| = 2π/λ.
  if (o.wavelength_nm) {
    s.wavelength_nm = *o.wavelength_nm;
    if (!o.k_over_2pi) s.k_over_2pi.reset();
  }
  if (o.k_over_2pi) s.k_over_2pi = *o.k_over_2pi;
  r.provenance["wave_vector"] = (o.wavelength_nm || o.k_over_2pi) ? kUser : kCatalog;
  if (o.cycles) s.cycles = *o.cycles;
  r.provenance["cycles"] = o.cycles ? kUser : kCatalog;
  const double beta0 = o.beta0.value_or(cat.reference_beta0);
  r.provenance["beta0"] = o.beta0 ? kUser : kCatalog;
  try {
    s.validate();
  } catch (const DomainError& e) {
    throw ConfigError("overrides", e.what());
  }
  if (beta0 == cat.reference_beta0) r.reference = s.reference;
  r.plan = protocol::make_plan(s.plan_inputs(beta0), units::pinned_constants(), c.options);
  r.species = std::move(s);
  return r;
}

// ---------------------------------------------------------------------------
// Subcommands

namespace {

Json settings_json(const RunConfig& c) {
  Json j;
  j["dim"] = c.numeric.dim;
  j["precision_bits"] = c.numeric.precision_bits;
  j["accuracy"] = c.numeric.accuracy;
  j["truncation_rel_tol"] = c.numeric.truncation_rel_tol;
  j["closure_tol"] = c.numeric.closure_tol;
  j["quick"] = c.quick;
  j["provenance"] = c.settings_provenance;
  return j;
}

Json options_json(const protocol::PlanOptions& o) {
  return Json{
      {"detuning_model", o.detuning_model == protocol::DetuningModel::exact ? "exact" : "simplified"},
      {"lamb_dicke", o.lamb_dicke},
      {"x_source", o.x_source == protocol::XSource::analytic ? "analytic" : "numeric"}};
}

Json plan_header(Mode mode, const ResolvedPlan& rp, const RunConfig& c) {
  Json j;
  j["command"] = std::string(to_string(mode));
  j["species"] = rp.species ? Json(rp.species->name) : Json(nullptr);
  j["inputs"] = report::plan_inputs(rp.plan.inputs);
  j["provenance"] = rp.provenance;
  j["options"] = options_json(rp.plan.options);
  j["settings"] = settings_json(c);
  j["warnings"] = rp.plan.warnings;
  j["conventions"] = report::conventions(rp.plan.constants, c.numeric.precision_bits);
  return j;
}

void require_json(const RunConfig& c, Mode mode) {
  if (c.format != Format::json) {
    throw ConfigError("output.format",
                      fmt::format("{} writes JSON only; csv is available for bound and table1",
                                  to_string(mode)));
  }
}

struct CommandResult {
  std::string text;
  int status = kExitOk;
};

CommandResult cmd_phase(const RunConfig& c) {
  require_json(c, Mode::phase);
  const ResolvedPlan rp = resolve_plan(c);
  const unsigned bits = c.numeric.precision_bits;
  const protocol::PhaseResult r = protocol::total_phase(rp.plan, bits);
  const bounds::PhaseSensitivity s = bounds::phase_sensitivity(rp.plan, rp.reference, bits);
  Json j = plan_header(Mode::phase, rp, c);
  j["phase"] = report::phase_result(r);
  j["sensitivity"] = report::phase_sensitivity(s);
  Json alts = Json::array();
  if (rp.species && rp.species->k_over_2pi && rp.provenance.at("wave_vector") == kCatalog) {
    bounds::SpeciesSpec wl = *rp.species;
    wl.k_over_2pi.reset();
    const protocol::PulsePlan alt =
        protocol::make_plan(wl.plan_inputs(rp.plan.inputs.beta0), rp.plan.constants, rp.plan.options);
    const protocol::PhaseResult ar = protocol::total_phase(alt, bits);
    alts.push_back({{"label", fmt::format("|k| = 2 pi / lambda with lambda = {} nm", wl.wavelength_nm)},
                    {"phi0_wrapped", report::wrapped(ar.phi0_wrapped)},
                    {"dphi_wrapped", report::wrapped(ar.dphi_wrapped)},
                    {"phi_wrapped", report::wrapped(ar.phi_wrapped)}});
  }
  j["alternatives"] = alts;
  return {report::dump(j), kExitOk};
}

CommandResult cmd_simulate(const RunConfig& c, const std::optional<std::filesystem::path>& dump_path) {
  require_json(c, Mode::simulate);
  const ResolvedPlan rp = resolve_plan(c);
  const protocol::PulsePlan& plan = rp.plan;
  const std::uint64_t n = plan.cycles();
  if (n == 0 || n > kMaxSimulatedCycles) {
    throw DomainError(fmt::format("simulate propagates 1..{} cycles explicitly; the plan has {}",
                                  kMaxSimulatedCycles, n));
  }
  const fock::Index dim = c.numeric.dim;
  const fock::Index n_max = dim / 4;
  const fock::UnitaryOperator u = protocol::NumericOracle(plan, dim).run(n);

  const protocol::CyclePhase cp = protocol::cycle_phase(plan, c.numeric.precision_bits);
  const double phi0 = cp.phi0_cycle.to_double() * static_cast<double>(n);
  const double dphi =
      cp.beta_tolerance_d.to_double() * static_cast<double>(protocol::progression_closed_form(n));
  const fock::Matrix target =
      std::polar(1.0, std::remainder(phi0 + dphi, 2.0 * std::numbers::pi)) *
      fock::Matrix::Identity(dim, dim);
  const double closure =
      fock::norm(fock::FockOperator(fock::Matrix(u.matrix() - target)).interior(n_max));

  Json j = plan_header(Mode::simulate, rp, c);
  Json sim;
  sim["dim"] = dim;
  sim["n_max"] = n_max;
  sim["kappa"] = protocol::total_phase(plan, c.numeric.precision_bits).kappa;
  sim["unitarity_defect"] = u.unitarity_defect();
  sim["closed_form_phi0"] = phi0;
  sim["closed_form_dphi"] = dphi;
  sim["interior_distance_to_closed_form_scalar"] = closure;

  bool ok = u.unitarity_defect() <= fock::kMaxUnitarityDefect;
  std::vector<std::string> failures;
  if (!ok) failures.push_back("propagator is not unitary within tolerance");
  if (plan.gup.beta == 0.0 && closure > c.numeric.closure_tol) {
    ok = false;
    failures.push_back(fmt::format("loop does not close: {:.3e} > {:.0e}", closure,
                                   c.numeric.closure_tol));
  }
  if (!c.quick) {
    const fock::UnitaryOperator u2 = protocol::NumericOracle(plan, 2 * dim).run(n);
    const fock::FockOperator a = u.as_operator().interior(n_max);
    const fock::FockOperator b = u2.as_operator().interior(n_max);
    const double rel = fock::norm(a - b, fock::Norm::frobenius) / fock::norm(b, fock::Norm::frobenius);
    sim["dim_doubling_relative_change"] = rel;
    if (rel > c.numeric.truncation_rel_tol) {
      ok = false;
      failures.push_back(fmt::format("truncation not converged at dim {} ({:.3e}); raise --dim",
                                     dim, rel));
    }
  } else {
    sim["dim_doubling_relative_change"] = nullptr;
  }
  if (plan.gup.beta > 0.0) {
    const auto series = protocol::numeric_beta_phase_series(plan, dim);
    Json rows = Json::array();
    for (std::uint64_t k = 1; k <= n; ++k) {
      const double formula = cp.beta_tolerance_d.to_double() *
                             static_cast<double>(protocol::progression_closed_form(k));
      rows.push_back({{"cycles", k},
                      {"numeric_beta_phase", series[k - 1].phase},
                      {"formula_beta_phase", formula},
                      {"overlap_amplitude", series[k - 1].amplitude}});
    }
    sim["beta_phase_by_cycle"] = rows;
  }
  sim["checks_passed"] = ok;
  sim["failures"] = failures;
  j["simulation"] = sim;

  if (dump_path) {
    std::ofstream f(*dump_path, std::ios::binary);
    if (!f) throw ConfigError("dump-operator", "cannot write " + dump_path->string());
    fock::write_operator(f, u.as_operator());
  }
  return {report::dump(j), ok ? kExitOk : kExitPhysics};
}

CommandResult cmd_bound(const RunConfig& c) {
  const ResolvedPlan rp = resolve_plan(c);
  bounds::BoundOptions bo;
  bo.precision_bits = c.numeric.precision_bits;
  const double eps = c.numeric.accuracy;
  const bounds::BoundReport r =
      rp.species ? bounds::solve_beta0_bound(*rp.species, eps, rp.plan.constants, bo)
                 : bounds::solve_beta0_bound(rp.plan, eps, bo);
  const std::optional<double> claimed =
      rp.species ? std::optional<double>(rp.species->claimed_bound) : std::nullopt;
  const bool agreement = claimed && bounds::within_one_decade(r.beta0_bound, *claimed);
  if (c.format == Format::csv) {
    std::string text = std::string(report::kCsvHeader) + "\n";
    if (rp.species) {
      text += report::csv_row(*rp.species, r, agreement) + "\n";
    } else {
      const protocol::PlanInputs& in = rp.plan.inputs;
      text += fmt::format("custom,{},{},{},{},{:.12e},{},{:.6e},,\n",
                          in.wavelength ? fmt::format("{}", *in.wavelength * 1e9) : "", in.cycles,
                          in.trap_freq_hz, in.dk_over_k, r.phi0_wrapped, bounds::to_string(r.regime),
                          r.beta0_bound);
    }
    return {text, kExitOk};
  }
  Json j = plan_header(Mode::bound, rp, c);
  j["bound"] = report::bound_report(r);
  j["claimed_bound"] = claimed ? Json(*claimed) : Json(nullptr);
  j["agreement"] = claimed ? Json(agreement) : Json(nullptr);
  return {report::dump(j), kExitOk};
}

CommandResult cmd_table1(const RunConfig& c) {
  const bounds::Catalog cat = c.catalog ? bounds::load_catalog(*c.catalog)
                                        : bounds::load_default_catalog();
  const units::PhysicalConstants constants = units::pinned_constants();
  const std::vector<bounds::Table1Row> rows = bounds::table1(cat, c.numeric.accuracy, constants);
  if (c.format == Format::csv) {
    std::string text = std::string(report::kCsvHeader) + "\n";
    for (const bounds::Table1Row& row : rows) {
      text += report::csv_row(row.spec, row.report, row.agreement) + "\n";
    }
    return {text, kExitOk};
  }
  Json j;
  j["command"] = "table1";
  j["accuracy"] = c.numeric.accuracy;
  j["catalog_version"] = cat.version;
  Json arr = Json::array();
  for (const bounds::Table1Row& row : rows) arr.push_back(report::table1_row(row));
  j["rows"] = arr;
  j["settings"] = settings_json(c);
  j["conventions"] = report::conventions(constants, c.numeric.precision_bits);
  return {report::dump(j), kExitOk};
}

CommandResult cmd_verify(const RunConfig& c, std::ostream& err) {
  require_json(c, Mode::verify);
  verify::VerifyOptions vo;
  vo.quick = c.quick;
  vo.precision_bits = c.numeric.precision_bits;
  vo.catalog = c.catalog;
  const std::vector<verify::SuiteResult> results = verify::run_all(vo);
  bool all = true;
  for (const verify::SuiteResult& r : results) {
    all = all && r.passed;
    err << fmt::format("[{}] {} {} ({:.2f} s / {:.0f} s): {}\n", r.passed ? "PASS" : "FAIL", r.id,
                       r.name, r.runtime_seconds, r.budget_seconds, r.summary);
  }
  return {verify::report_json(results, vo), all ? kExitOk : kExitPhysics};
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (!c.output) {
    out << text;
    return;
  }
  std::ofstream f(*c.output, std::ios::binary);
  if (!f || !(f << text)) throw ConfigError("output.path", "cannot write " + c.output->string());
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trapped-ion GUP phase simulator and bound calculator", "gupsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", GUPSIM_VERSION);

  struct Flags {
    std::optional<std::string> config, species, output, format;
    std::optional<double> beta0, accuracy;
    std::optional<std::uint64_t> cycles;
    std::optional<fock::Index> dim;
    std::optional<unsigned> precision_bits;
    std::optional<std::string> dump_operator;
    bool quick = false;
  } f;

  const std::pair<Mode, const char*> modes[] = {
      {Mode::phase, "Closed-form phases with constant sensitivity"},
      {Mode::simulate, "Brute-force Fock-space propagation of the pulse sequence"},
      {Mode::verify, "Run the acceptance suites"},
      {Mode::bound, "Upper bound on beta0 for a target population accuracy"},
      {Mode::table1, "Bounds for every catalog species"}};
  std::vector<std::pair<Mode, CLI::App*>> subs;
  for (const auto& [mode, help] : modes) {
    CLI::App* s = app.add_subcommand(std::string(to_string(mode)), help);
    s->add_option("--config", f.config, "JSON run config");
    s->add_option("--species", f.species, "Catalog species name");
    s->add_option("--beta0", f.beta0, "Dimensionless deformation parameter");
    s->add_option("--cycles", f.cycles, "Number of four-pulse cycles");
    s->add_option("--dim", f.dim, "Fock truncation dimension");
    s->add_option("--precision-bits", f.precision_bits, "Working precision for phases");
    s->add_option("--accuracy", f.accuracy, "Population accuracy for the bound");
    s->add_option("--output", f.output, "Write the report here instead of stdout");
    s->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    s->add_flag("--quick", f.quick, "Reduced dimensions and sweeps");
    if (mode == Mode::simulate) {
      s->add_option("--dump-operator", f.dump_operator, "Write the propagator in binary form");
    }
    subs.emplace_back(mode, s);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Mode mode = Mode::phase;
  for (const auto& [m, s] : subs) {
    if (s->parsed()) mode = m;
  }

  try {
    RunConfig c;
    if (f.config) {
      c = load_config(*f.config);
    } else {
      set_default_provenance(c);
    }
    if (c.mode && *c.mode != mode) {
      throw ConfigError("mode", fmt::format("config is for '{}' but the subcommand is '{}'",
                                            to_string(*c.mode), to_string(mode)));
    }
    c.mode = mode;
    if (f.species) {
      if (c.plan) throw ConfigError("species", "the config already gives an explicit plan");
      c.species = f.species;
    }
    if (f.beta0) c.overrides.beta0 = f.beta0;
    if (f.cycles) c.overrides.cycles = f.cycles;
    if (f.dim) {
      c.numeric.dim = *f.dim;
      c.settings_provenance["numeric.dim"] = kUser;
    }
    if (f.precision_bits) {
      c.numeric.precision_bits = *f.precision_bits;
      c.settings_provenance["numeric.precision_bits"] = kUser;
    }
    if (f.accuracy) {
      c.numeric.accuracy = *f.accuracy;
      c.settings_provenance["numeric.accuracy"] = kUser;
    }
    if (f.output) c.output = *f.output;
    if (f.format) {
      c.format = parse_format(*f.format, "format");
      c.settings_provenance["output.format"] = kUser;
    }
    if (f.quick) c.quick = true;
    if (c.overrides.beta0 && *c.overrides.beta0 < 0.0) {
      throw ConfigError("beta0", "must be non-negative");
    }
    check_numeric(c.numeric);

    CommandResult res;
    switch (mode) {
      case Mode::phase: res = cmd_phase(c); break;
      case Mode::simulate:
        res = cmd_simulate(c, f.dump_operator ? std::optional<std::filesystem::path>(*f.dump_operator)
                                              : std::nullopt);
        break;
      case Mode::verify: res = cmd_verify(c, err); break;
      case Mode::bound: res = cmd_bound(c); break;
      case Mode::table1: res = cmd_table1(c); break;
    }
    emit(c, res.text, out);
    return res.status;
  } catch (const ConfigError& e) {
    err << "gupsim: config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "gupsim: invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PrecisionError& e) {
    err << "gupsim: precision failure: " << e.what() << "\n";
    return kExitPhysics;
  } catch (const ConvergenceError& e) {
    err << "gupsim: convergence failure: " << e.what() << "\n";
    return kExitPhysics;
  } catch (const std::exception& e) {
    err << "gupsim: " << e.what() << "\n";
    return kExitPhysics;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace gupsim::cli
