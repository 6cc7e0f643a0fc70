#include "report.hpp"

#include <numbers>

#include <fmt/core.h>

namespace gupsim::report {

std::string decimal(const units::BigFloat& v, int digits) { return v.to_decimal(digits); }

std::vector<std::string> discrepancy_ledger() {
  return {
      "deformed momentum printed as p(1 + beta p^3 / 3) is dimensionally inconsistent with the "
      "deformed commutator and the beta p^4 / 3m Hamiltonian term; implemented p(1 + beta p^2 / 3)",
      "the Heisenberg position operator mixes the symbols omega and nu; omega is read as the trap "
      "frequency nu",
      "the per-pulse beta phase writes an explicit beta next to a coefficient xi that already "
      "contains beta; implemented with a single beta and xi_tilde = hbar^3 pi / (256 m nu) "
      "(dk Omega1 Omega2 / Delta)^4",
      "the condition for eliminating the ordinary phase is printed with exponent 4; applied to the "
      "exponent-2 per-cycle phase -(hbar / 4 m nu) X^2",
      "Rabi frequencies printed as '2 GMz'; read as 2e9 rad/s",
      "mass 173.04 u is quoted for 171Yb+; used as printed (isotope mass reported as an "
      "alternative)",
      "|k| = 2 pi / lambda quoted as 2.7 x 2 pi rad/um while 2 pi / 369.5 nm = 2.706 x 2 pi rad/um; "
      "the quoted value is used for the Yb171 row, the wavelength reading is reported alongside",
      "species rows inherit all unlisted parameters from the text set, mass included",
  };
}

Json conventions(const units::PhysicalConstants& constants, unsigned precision_bits) {
  const units::ConstantUncertainties u = units::pinned_uncertainties();
  Json c;
  c["constants"] = {
      {"table", std::string(constants.name)},
      {"hbar_J_s", std::string(constants.hbar_text)},
      {"c_m_per_s", std::string(constants.c_text)},
      {"planck_mass_kg", std::string(constants.planck_mass_text)},
      {"atomic_mass_unit_kg", std::string(constants.atomic_mass_unit_text)},
  };
  c["constant_relative_uncertainties"] = {
      {"hbar", u.hbar}, {"c", u.c}, {"planck_mass", u.planck_mass},
      {"atomic_mass_unit", u.atomic_mass_unit}};
  c["frequency_convention"] =
      "trap frequency entered as nu/2pi in Hz and stored as nu = 2 pi f in rad/s; Rabi "
      "frequencies and detuning are taken as angular frequencies (rad/s) as written";
  c["wave_vector_convention"] = "|k| = 2 pi k_over_2pi when given, else 2 pi / lambda; dk = dk_over_k |k|";
  c["wrapping_convention"] = "(-pi, pi]";
  c["precision_bits"] = precision_bits;
  c["deformation"] = "p_hat = p (1 + beta p^2 / 3), beta = beta0 / (M_p c)^2";
  c["detuning_model"] =
      "numeric propagation uses Omega_tilde = hbar O1 O2 (D1 + D2) / (8 D1 D2) with D1 = Delta, "
      "D2 = Delta + nu; closed forms use hbar O1 O2 / (4 Delta)";
  c["discrepancies"] = discrepancy_ledger();
  c["version"] = GUPSIM_VERSION;
  return c;
}

Json wrapped(const units::WrappedAngle& a) {
  const units::BigFloat over_pi = a.value / units::BigFloat::pi(a.value.precision());
  return Json{{"radians", decimal(a.value)},
              {"over_pi", decimal(over_pi)},
              {"error_bound", a.error_bound}};
}

Json phase_result(const protocol::PhaseResult& r) {
  const units::BigFloat phi0 = r.phi0_unwrapped.value();
  const units::BigFloat dphi = r.dphi_unwrapped.value();
  Json j;
  j["phi0_unwrapped"] = decimal(phi0);
  j["dphi_unwrapped"] = decimal(dphi);
  j["phi_unwrapped"] = decimal(phi0 + dphi);
  j["phi0_wrapped"] = wrapped(r.phi0_wrapped);
  j["dphi_wrapped"] = wrapped(r.dphi_wrapped);
  j["phi_wrapped"] = wrapped(r.phi_wrapped);
  j["beta_tolerance_d"] = decimal(r.beta_tolerance_d);
  j["first_cycle_increments"] = r.first_cycle_increments;
  j["eta"] = r.eta;
  j["xi_tilde"] = r.xi_tilde;
  j["kappa"] = r.kappa;
  j["omega_tilde_relative_difference"] = r.omega_tilde_relative_difference;
  j["nu_t_p"] = r.harmonic_drift;
  j["cycles"] = r.cycles;
  j["precision_bits"] = r.precision_bits;
  return j;
}

Json plan_inputs(const protocol::PlanInputs& in) {
  Json j;
  j["mass_u"] = in.mass_u;
  j["trap_freq_over_2pi_hz"] = in.trap_freq_hz;
  j["pulse_duration_s"] = in.pulse_duration;
  j["rabi1_rad_per_s"] = in.rabi1;
  j["rabi2_rad_per_s"] = in.rabi2;
  j["detuning_rad_per_s"] = in.detuning;
  j["wavelength_m"] = in.wavelength ? Json(*in.wavelength) : Json(nullptr);
  j["k_over_2pi_per_m"] = in.k_over_2pi ? Json(*in.k_over_2pi) : Json(nullptr);
  j["dk_over_k"] = in.dk_over_k;
  j["cycles"] = in.cycles;
  j["beta0"] = in.beta0;
  return j;
}

Json bound_report(const bounds::BoundReport& r) {
  Json j;
  j["species"] = r.species;
  j["accuracy"] = r.accuracy;
  j["beta0_bound"] = r.beta0_bound;
  j["beta0_bound_headline"] = r.beta0_bound_headline;
  j["phi0_wrapped"] = r.phi0_wrapped;
  j["phi0_computed"] = r.phi0_computed;
  j["phi0_overridden"] = r.phi0_overridden;
  j["dphi_per_beta0"] = r.dphi_per_beta0;
  j["dphi_at_bound"] = r.dphi_at_bound;
  j["delta_population_at_bound"] = r.delta_population_at_bound;
  j["roundtrip_relative_error"] = r.roundtrip_relative_error;
  j["closed_form_bound"] = r.closed_form_bound;
  j["bisection_bound"] = r.bisection_bound;
  j["method_relative_difference"] = r.method_relative_difference;
  j["regime"] = std::string(bounds::to_string(r.regime));
  j["wrap_limited"] = r.wrap_limited;
  Json sens = Json::array();
  for (const bounds::SensitivityRow& s : r.sensitivity) {
    sens.push_back({{"parameter", s.parameter},
                    {"bound_at_minus_1pct", s.bound_minus},
                    {"bound_at_plus_1pct", s.bound_plus}});
  }
  j["sensitivity"] = sens;
  j["discrepancy_notes"] = r.discrepancy_notes;
  return j;
}

Json phase_sensitivity(const bounds::PhaseSensitivity& s) {
  const auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json rows = Json::array();
  for (const bounds::ConstantSensitivity& r : s.rows) {
    rows.push_back({{"constant", r.constant},
                    {"relative_uncertainty", r.relative_uncertainty},
                    {"dphi_dlog", r.dphi_dlog},
                    {"dphi_dlog_finite_difference", r.dphi_dlog_numeric},
                    {"d_beta_phase_dlog", r.ddphi_dlog},
                    {"phase_uncertainty_rad", r.phase_uncertainty},
                    {"relative_change_needed_for_phi", opt(r.needed_for_phi)},
                    {"relative_change_needed_for_dphi", opt(r.needed_for_dphi)},
                    {"reachable_alone", r.reachable}});
  }
  Json j;
  j["rows"] = rows;
  j["phi_wrapped_over_pi"] = s.phi_wrapped / std::numbers::pi;
  j["dphi_wrapped_over_pi"] = s.dphi_wrapped / std::numbers::pi;
  j["combined_phi_uncertainty_rad"] = s.combined_phi_uncertainty;
  j["combined_dphi_uncertainty_rad"] = s.combined_dphi_uncertainty;
  if (s.reference) {
    j["reference"] = {{"phi_over_pi", s.reference->phi_over_pi},
                      {"dphi_over_pi", s.reference->dphi_over_pi}};
    j["phi_distance_rad"] = s.phi_distance;
    j["dphi_distance_rad"] = s.dphi_distance;
    j["phi_reachable_within_uncertainty"] = s.phi_reachable;
    j["dphi_reachable_within_uncertainty"] = s.dphi_reachable;
  } else {
    j["reference"] = nullptr;
  }
  return j;
}

Json table1_row(const bounds::Table1Row& row) {
  Json j = bound_report(row.report);
  j["claimed_bound"] = row.spec.claimed_bound;
  j["agreement"] = row.agreement;
  j["lambda_nm"] = row.spec.wavelength_nm;
  j["cycles"] = row.spec.cycles;
  j["nu_over_2pi_hz"] = row.spec.trap_freq_over_2pi;
  j["dk_over_k"] = row.spec.dk_over_k;
  j["mass_u"] = row.spec.mass_u;
  j["levels"] = {{"e", row.spec.level_labels[0]},
                 {"g", row.spec.level_labels[1]},
                 {"r", row.spec.level_labels[2]}};
  Json alts = Json::array();
  for (const auto& [label, rep] : row.alternatives) {
    alts.push_back({{"label", label},
                    {"beta0_bound", rep.beta0_bound},
                    {"phi0_wrapped", rep.phi0_wrapped},
                    {"regime", std::string(bounds::to_string(rep.regime))},
                    {"agreement", bounds::within_one_decade(rep.beta0_bound, row.spec.claimed_bound)}});
  }
  j["alternatives"] = alts;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string csv_row(const bounds::SpeciesSpec& spec, const bounds::BoundReport& r, bool agreement) {
  return fmt::format("{},{},{},{},{},{:.12e},{},{:.6e},{:.0e},{}", spec.name, spec.wavelength_nm,
                     spec.cycles, spec.trap_freq_over_2pi, spec.dk_over_k, r.phi0_wrapped,
                     bounds::to_string(r.regime), r.beta0_bound, spec.claimed_bound,
                     agreement ? "yes" : "no");
}

}  // namespace gupsim::report
