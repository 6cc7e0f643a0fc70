#include "gupsim/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "gupsim/bounds.hpp"
#include "gupsim/error.hpp"
#include "gupsim/fit.hpp"
#include "gupsim/fock.hpp"
#include "gupsim/gup.hpp"
#include "gupsim/protocol.hpp"
#include "gupsim/zassenhaus.hpp"
#include "report.hpp"

namespace gupsim::verify {

using detail::Json;
using fock::Complex;
using fock::FockOperator;
using fock::Index;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool passed = false;
  std::string summary;
  Json data;
};

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

// ---------------------------------------------------------------------------

Outcome loop_closure(const VerifyOptions&) {
  constexpr Index dim = 64;
  constexpr Index n_max = 16;
  constexpr double tol = 1e-6;
  Json rows = Json::array();
  std::vector<double> errs;
  for (const double s : {0.1, 0.5, 1.0}) {
    // s = ηt_p·x0, so κ = X·x0 = 2s.
    const protocol::PulsePlan plan = protocol::natural_plan(2.0 * s, 0.0, 1);
    const fock::UnitaryOperator u = protocol::NumericOracle(plan, dim).run(1);
    const double phi0 = protocol::cycle_phase(plan).phi0_cycle.to_double();
    const fock::Matrix target = std::polar(1.0, phi0) * fock::Matrix::Identity(dim, dim);
    const double err =
        fock::norm(FockOperator(fock::Matrix(u.matrix() - target)).interior(n_max));
    errs.push_back(err);
    rows.push_back({{"eta_tp_x0", s},
                    {"phi0_cycle", phi0},
                    {"interior_error", err},
                    {"unitarity_defect", u.unitarity_defect()}});
  }
  const double worst = max_of(errs);
  return {worst <= tol,
          fmt::format("max ||U3U2U1U0 - exp(i phi0_cycle)|| on n<={} = {:.3e} (tol {:.0e})", n_max,
                      worst, tol),
          Json{{"dim", dim}, {"n_max", n_max}, {"tolerance", tol}, {"cases", rows}}};
}

Outcome heisenberg_slope(const VerifyOptions&) {
  constexpr Index dim = 64;
  constexpr Index n_max = dim / 2;
  const std::vector<double> betas{1e-5, 1e-4, 1e-3};
  const units::OscillatorScales scales = units::OscillatorScales::natural();
  const units::PhysicalConstants natural = units::PhysicalConstants::natural();
  Json rows = Json::array();
  bool ok = true;
  std::vector<double> slopes;
  for (const double nut : {0.5, 1.0, 2.0}) {
    std::vector<double> diffs;
    for (const double b : betas) {
      const gup::GupParams params = gup::make_gup_params(b, 1.0, 1.0, natural);
      const FockOperator xa = gup::x_heisenberg_analytic(nut, params, scales, dim);
      const FockOperator xn = gup::x_heisenberg_numeric(nut, params, scales, dim);
      diffs.push_back(fock::norm((xa - xn).interior(n_max)));
    }
    const double slope = loglog_slope(betas, diffs);
    slopes.push_back(slope);
    ok = ok && std::abs(slope - 2.0) <= 0.2;
    rows.push_back({{"nu_t", nut}, {"differences", diffs}, {"slope", slope}});
  }
  return {ok,
          fmt::format("log-log slopes of ||x_analytic - x_numeric|| vs beta: {:.3f}, {:.3f}, {:.3f} "
                      "(target 2.0 +- 0.2)",
                      slopes[0], slopes[1], slopes[2]),
          Json{{"dim", dim}, {"n_max", n_max}, {"betas", betas}, {"cases", rows}}};
}

Outcome split_consistency(const VerifyOptions& opt) {
  const Index dim = opt.quick ? 48 : 64;
  const Index n_max = dim / 2 - 8;
  constexpr double rel_tol = 1e-8;
  Json cases = Json::array();
  bool terms_ok = true;
  bool skew_ok = true;
  double worst_rel = 0.0;
  std::array<double, 3> worst_factor_dev{};
  for (const double kappa : {0.5, 2.0, 8.0}) {
    const protocol::PulsePlan plan = protocol::natural_plan(kappa, 1e-3, 1);
    const double t = plan.laser.pulse_duration;
    const auto g = zassenhaus::pulse_split_generators(plan.laser, plan.gup, plan.scales, t, dim);
    const auto first = zassenhaus::zassenhaus_terms_first_order(g.A, g.B);
    const auto closed = zassenhaus::c_terms_closed_form(plan.laser, plan.gup, plan.scales, t, dim);
    const auto full = zassenhaus::zassenhaus_terms(g.A, g.B);
    Json terms = Json::array();
    for (int k = 0; k < 3; ++k) {
      const fock::Matrix f = first[k].interior(n_max).matrix();
      const fock::Matrix c = closed[k].interior(n_max).matrix();
      const double rel = fock::norm(FockOperator(fock::Matrix(c - f))) / fock::norm(FockOperator(f));
      // Least-squares global factor c ≈ λ f.
      const Complex factor = f.conjugate().cwiseProduct(c).sum() / f.squaredNorm();
      worst_rel = std::max(worst_rel, rel);
      worst_factor_dev[k] = std::max(worst_factor_dev[k], std::abs(factor - 1.0));
      terms_ok = terms_ok && rel <= rel_tol;
      const bool skew = full[k].is_skew_hermitian(1e-10) && closed[k].is_skew_hermitian(1e-10);
      skew_ok = skew_ok && skew;
      terms.push_back({{"term", k + 1},
                       {"relative_difference", rel},
                       {"fitted_factor_re", factor.real()},
                       {"fitted_factor_im", factor.imag()},
                       {"skew_hermitian", skew}});
    }
    cases.push_back({{"kappa", kappa}, {"terms", terms}});
  }

  // Product residual against β at fixed κ = 1.
  const std::vector<double> betas{1e-5, 1e-4, 1e-3};
  std::vector<double> residuals;
  for (const double b : betas) {
    const protocol::PulsePlan plan = protocol::natural_plan(1.0, b, 1);
    const auto g = zassenhaus::pulse_split_generators(plan.laser, plan.gup, plan.scales,
                                                   plan.laser.pulse_duration, 64);
    residuals.push_back(
        zassenhaus::product_residual(g.A, g.B, zassenhaus::zassenhaus_terms(g.A, g.B), 16));
  }
  const double slope = loglog_slope(betas, residuals);
  const bool slope_ok = std::abs(slope - 2.0) <= 0.2;

  Json data{{"dim", dim},
            {"n_max", n_max},
            {"tolerance", rel_tol},
            {"cases", cases},
            {"constant_factor_deviation", worst_factor_dev},
            {"residual_betas", betas},
            {"residuals", residuals},
            {"residual_slope", slope}};
  return {terms_ok && skew_ok && slope_ok,
          fmt::format("closed-form C terms vs nested commutators: worst rel {:.2e} (tol {:.0e}), "
                      "global factors 1 within {:.1e}; product residual slope {:.3f} (O(beta^2))",
                      worst_rel, rel_tol, max_of({worst_factor_dev.begin(), worst_factor_dev.end()}),
                      slope),
          data};
}

Outcome leading_order(const VerifyOptions&) {
  constexpr Index dim = 64;
  constexpr Index n_max = 16;
  const std::vector<double> kappas{2, 4, 8, 16};
  std::vector<double> r1, r2, measured_kappa;
  for (const double k : kappas) {
    const protocol::PulsePlan plan = protocol::natural_plan(k, 1e-4, 1);
    const auto gap = zassenhaus::leading_order_gap(plan.laser, plan.gup, plan.scales,
                                                   plan.laser.pulse_duration, dim, n_max);
    r1.push_back(gap.c1_over_c3);
    r2.push_back(gap.c2_over_c3);
    measured_kappa.push_back(gap.kappa);
  }
  const double e1 = loglog_slope(measured_kappa, r1);
  const double e2 = loglog_slope(measured_kappa, r2);
  return {e1 <= -1.5,
          fmt::format("||C1||/|C3| exponent {:.3f} (<= -1.5), ||C2||/|C3| exponent {:.3f}", e1, e2),
          Json{{"dim", dim},
               {"n_max", n_max},
               {"kappa", measured_kappa},
               {"c1_over_c3", r1},
               {"c2_over_c3", r2},
               {"c1_exponent", e1},
               {"c2_exponent", e2}}};
}

Outcome n_cycle_oracle(const VerifyOptions& opt) {
  struct Case {
    double kappa;
    Index dim;
  };
  const std::vector<Case> cases = opt.quick ? std::vector<Case>{{4, 64}, {8, 128}}
                                            : std::vector<Case>{{8, 128}, {16, 256}};
  constexpr double beta = 1e-4;
  constexpr std::uint64_t n_max = 3;
  constexpr double rel_tol = 0.10;
  Json rows = Json::array();
  std::vector<std::vector<double>> devs;
  for (const Case& c : cases) {
    const protocol::PulsePlan plan = protocol::natural_plan(c.kappa, beta, n_max);
    const auto series = protocol::numeric_beta_phase_series(plan, c.dim);
    const double d = beta * protocol::xi_tilde(plan.laser, plan.scales) *
                     std::pow(plan.laser.pulse_duration, 4);
    std::vector<double> numeric, formula, rel, amplitude;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
      const double f = static_cast<double>(protocol::progression_closed_form(n)) * d;
      numeric.push_back(series[n - 1].phase);
      formula.push_back(f);
      rel.push_back(std::abs(series[n - 1].phase - f) / std::abs(f));
      amplitude.push_back(series[n - 1].amplitude);
    }
    devs.push_back(rel);
    rows.push_back({{"kappa", c.kappa},
                    {"dim", c.dim},
                    {"numeric_beta_phase", numeric},
                    {"formula_beta_phase", formula},
                    {"relative_deviation", rel},
                    {"overlap_amplitude", amplitude},
                    {"continuation_steps", series.back().continuation_steps}});
  }
  const bool within = max_of(devs[1]) <= rel_tol;
  bool improving = true;
  for (std::size_t n = 0; n < n_max; ++n) improving = improving && devs[1][n] < devs[0][n];
  return {within && improving,
          fmt::format("numeric vs 2N(4N-1) beta xi t_p^4: max rel deviation {:.3f} at kappa={} and "
                      "{:.3f} at kappa={} (tol {:.2f}, must improve with kappa)",
                      max_of(devs[0]), cases[0].kappa, max_of(devs[1]), cases[1].kappa, rel_tol),
          Json{{"beta", beta},
               {"tolerance", rel_tol},
               {"cases", rows},
               {"within_tolerance", within},
               {"improving", improving}}};
}

bounds::Catalog catalog_for(const VerifyOptions& opt) {
  return opt.catalog ? bounds::load_catalog(*opt.catalog) : bounds::load_default_catalog();
}

Outcome yb_bound(const VerifyOptions& opt) {
  const bounds::Catalog cat = catalog_for(opt);
  const bounds::BoundReport r =
      bounds::solve_beta0_bound(cat.find("Yb171"), 1e-5, units::pinned_constants());
  const bool ok = r.beta0_bound >= 1e23 && r.beta0_bound <= 1e25;
  return {ok,
          fmt::format("Yb171 bound at accuracy 1e-5: {:.4e} (headline {:.0e}), window [1e23, 1e25]",
                      r.beta0_bound, r.beta0_bound_headline),
          report::bound_report(r)};
}

Outcome phase_targets(const VerifyOptions& opt) {
  const bounds::Catalog cat = catalog_for(opt);
  const bounds::SpeciesSpec& yb = cat.find("Yb171");
  const protocol::PulsePlan plan =
      protocol::make_plan(yb.plan_inputs(cat.reference_beta0), units::pinned_constants());
  const protocol::PhaseResult r = protocol::total_phase(plan, opt.precision_bits);
  const bounds::PhaseSensitivity s = bounds::phase_sensitivity(plan, yb.reference, opt.precision_bits);

  // The report must carry unwrapped and wrapped values and a sensitivity table
  // whose analytic derivatives agree with finite differences.
  bool derivatives_ok = true;
  for (const bounds::ConstantSensitivity& row : s.rows) {
    const double scale = std::max(std::abs(row.dphi_dlog), 1.0);
    derivatives_ok = derivatives_ok && std::abs(row.dphi_dlog - row.dphi_dlog_numeric) <= 1e-6 * scale;
  }
  const bool wrap_ok = r.phi_wrapped.error_bound <= units::kMaxWrapError &&
                       r.phi0_wrapped.error_bound <= units::kMaxWrapError;
  const bool has_reference = yb.reference.has_value();
  return {derivatives_ok && wrap_ok && has_reference,
          fmt::format("phi/pi = {:.7f}, dphi/pi = {:.6f} (quoted {:.7f}, {:.6f}); phi reachable "
                      "within constant uncertainty: {}, dphi: {}",
                      s.phi_wrapped / kPi, s.dphi_wrapped / kPi,
                      has_reference ? yb.reference->phi_over_pi : 0.0,
                      has_reference ? yb.reference->dphi_over_pi : 0.0,
                      s.phi_reachable ? "yes" : "no", s.dphi_reachable ? "yes" : "no"),
          Json{{"phase", report::phase_result(r)},
               {"sensitivity", report::phase_sensitivity(s)},
               {"derivatives_match_finite_differences", derivatives_ok}}};
}

Outcome scaling_laws(const VerifyOptions& opt) {
  const bounds::Catalog cat = catalog_for(opt);
  const bounds::SpeciesSpec& yb = cat.find("Yb171");
  const units::PhysicalConstants constants = units::pinned_constants();
  // N moves φ₀ by ~10¹² rad; the power laws are stated at fixed sin φ₀, so φ₀
  // is held at the base plan's value.
  const double phi0 =
      bounds::solve_beta0_bound(yb, 1e-5, constants, {std::nullopt, false}).phi0_computed;
  bounds::BoundOptions pinned{phi0, false};
  const std::vector<double> accuracies{1e-6, 1e-5, 1e-4};
  const std::vector<double> factors{0.5, 1.0, 2.0};
  Json grid = Json::array();
  std::vector<double> normalized;
  bool linear = true;
  for (const double f : factors) {
    bounds::SpeciesSpec s = yb;
    s.cycles = static_cast<std::uint64_t>(std::llround(static_cast<double>(yb.cycles) * f));
    const protocol::PulsePlan plan = protocol::make_plan(s.plan_inputs(1.0), constants);
    for (const double eps : accuracies) {
      const bounds::BoundReport r = bounds::solve_beta0_bound(plan, eps, pinned);
      const double n = static_cast<double>(s.cycles);
      normalized.push_back(r.beta0_bound * n * (4.0 * n - 1.0) / eps);
      linear = linear && r.regime == bounds::Regime::linear;
      grid.push_back({{"cycles", s.cycles},
                      {"accuracy", eps},
                      {"beta0_bound", r.beta0_bound},
                      {"regime", std::string(bounds::to_string(r.regime))}});
    }
  }
  const auto [lo, hi] = std::minmax_element(normalized.begin(), normalized.end());
  const double spread = *hi / *lo - 1.0;
  return {linear && spread <= 0.05,
          fmt::format("bound * N(4N-1) / accuracy constant within {:.2e} over the 3x3 grid (tol 5%)",
                      spread),
          Json{{"phi0_pinned", phi0}, {"grid", grid}, {"spread", spread}, {"all_linear", linear}}};
}

Outcome run_outcome(int id, const VerifyOptions& opt);

std::string fingerprint(const Outcome& o) { return o.data.dump() + (o.passed ? "1" : "0"); }

// Re-evaluates suites 1-8 and compares against `baseline` (computed here when empty).
Outcome determinism(const VerifyOptions& opt, std::vector<std::string> baseline = {}) {
  if (baseline.empty()) {
    for (int id = 1; id < kSuiteCount; ++id) baseline.push_back(fingerprint(run_outcome(id, opt)));
  }
  std::vector<int> differing;
  for (int id = 1; id < kSuiteCount; ++id) {
    if (fingerprint(run_outcome(id, opt)) != baseline[static_cast<std::size_t>(id - 1)]) {
      differing.push_back(id);
    }
  }
  return {differing.empty(),
          differing.empty() ? "suites 1-8 serialize identically on a second evaluation"
                            : fmt::format("{} suites serialize differently on re-run", differing.size()),
          Json{{"differing_suites", differing}}};
}

Outcome run_outcome(int id, const VerifyOptions& opt) {
  switch (id) {
    case 1: return loop_closure(opt);
    case 2: return heisenberg_slope(opt);
    case 3: return split_consistency(opt);
    case 4: return leading_order(opt);
    case 5: return n_cycle_oracle(opt);
    case 6: return yb_bound(opt);
    case 7: return phase_targets(opt);
    case 8: return scaling_laws(opt);
    case 9: return determinism(opt);
    default: throw DomainError(fmt::format("verify: no suite {}", id));
  }
}

}  // namespace

std::string_view suite_name(int id) {
  static constexpr std::string_view names[kSuiteCount] = {
      "loop_closure",       "heisenberg_first_order", "split_consistency",
      "leading_order_dominance", "n_cycle_formula_vs_oracle", "yb_bound",
      "phase_targets",      "scaling_laws",           "determinism"};
  if (id < 1 || id > kSuiteCount) throw DomainError(fmt::format("verify: no suite {}", id));
  return names[id - 1];
}

double suite_budget_seconds(int id) {
  static constexpr double budgets[kSuiteCount] = {5, 30, 30, 60, 120, 1, 5, 5, 600};
  if (id < 1 || id > kSuiteCount) throw DomainError(fmt::format("verify: no suite {}", id));
  return budgets[id - 1];
}

namespace {

template <class F>
SuiteResult timed(int id, F&& body) {
  SuiteResult r;
  r.id = id;
  r.name = std::string(suite_name(id));
  r.budget_seconds = suite_budget_seconds(id);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Outcome o = body();
    r.passed = o.passed;
    r.summary = std::move(o.summary);
    r.data_json = o.data.dump();
  } catch (const Error& e) {
    r.passed = false;
    r.summary = std::string("error: ") + e.what();
    r.data_json = Json{{"error", e.what()}}.dump();
  }
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

SuiteResult run_suite(int id, const VerifyOptions& options) {
  suite_name(id);
  return timed(id, [&] { return run_outcome(id, options); });
}

std::vector<SuiteResult> run_all(const VerifyOptions& options) {
  std::vector<SuiteResult> out;
  for (int id = 1; id < kSuiteCount; ++id) out.push_back(run_suite(id, options));
  std::vector<std::string> baseline;
  for (const SuiteResult& r : out) {
    baseline.push_back(r.data_json + (r.passed ? "1" : "0"));
  }
  out.push_back(timed(kSuiteCount, [&] { return determinism(options, baseline); }));
  return out;
}

std::string report_json(const std::vector<SuiteResult>& results, const VerifyOptions& options) {
  Json suites = Json::array();
  bool all = true;
  for (const SuiteResult& r : results) {
    all = all && r.passed;
    suites.push_back({{"id", r.id},
                      {"name", r.name},
                      {"status", r.passed ? "pass" : "fail"},
                      {"summary", r.summary},
                      {"measured", Json::parse(r.data_json)},
                      {"runtime_budget_seconds", r.budget_seconds}});
  }
  Json j;
  j["command"] = "verify";
  j["quick"] = options.quick;
  j["suites"] = suites;
  j["all_passed"] = all;
  j["conventions"] = report::conventions(units::pinned_constants(), options.precision_bits);
  return report::dump(j);
}

}  // namespace gupsim::verify
