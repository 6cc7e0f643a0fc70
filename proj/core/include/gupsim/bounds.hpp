#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gupsim/protocol.hpp"
#include "gupsim/units.hpp"

namespace gupsim::bounds {

struct ReferencePhases {
  double phi_over_pi = 0.0;   // wrapped total phase / π
  double dphi_over_pi = 0.0;  // wrapped β phase / π
};

struct SpeciesSpec {
  std::string name;
  std::string ion;
  double wavelength_nm = 0.0;
  std::optional<double> k_over_2pi;  // 1/m, overrides 2π/λ
  std::uint64_t cycles = 0;
  double trap_freq_over_2pi = 0.0;  // Hz
  double dk_over_k = 0.0;
  double mass_u = 0.0;
  std::array<std::string, 3> level_labels;  // e, g, r
  double claimed_bound = 0.0;
  bool phi0_claim = false;  // φ₀ stated to be a multiple of 2π
  std::optional<double> isotope_mass_u;
  std::optional<ReferencePhases> reference;

  // Inherited from the text parameter set.
  double pulse_duration = 0.0;
  double rabi1 = 0.0;
  double rabi2 = 0.0;
  double detuning = 0.0;

  // Throws DomainError: non-positive numeric field or dk_over_k > 2.
  void validate() const;
  protocol::PlanInputs plan_inputs(double beta0) const;
};

struct Catalog {
  int version = 0;
  std::string source;  // path or "<memory>"
  double reference_beta0 = 0.0;
  std::vector<SpeciesSpec> species;

  // Throws ConfigError naming the species when absent.
  const SpeciesSpec& find(std::string_view name) const;
};

// Throws ConfigError with a field path on schema violations.
Catalog parse_catalog(std::string_view json_text, std::string source = "<memory>");
Catalog load_catalog(const std::filesystem::path& path);
// GUPSIM_CATALOG if set, else the build-tree copy if present, else the installed copy.
std::filesystem::path default_catalog_path();
Catalog load_default_catalog();

// P_r = sin²(φ/2).
double readout_population(double phi);
// sin²((φ₀+δφ)/2) − sin²(φ₀/2), as sin(δφ/2)·sin(φ₀ + δφ/2).
double delta_population(double phi0, double dphi);

enum class Regime { linear, quadratic };
std::string_view to_string(Regime r);

struct SensitivityRow {
  std::string parameter;
  double bound_minus = 0.0;  // parameter × 0.99
  double bound_plus = 0.0;   // parameter × 1.01
};

struct BoundOptions {
  // Use this wrapped φ₀ instead of the plan's; the φ₀ = 2πm claim sets 0.
  std::optional<double> phi0_override;
  bool sensitivity = true;
  unsigned precision_bits = units::kDefaultPrecisionBits;
};

struct BoundReport {
  std::string species;
  double accuracy = 0.0;
  double beta0_bound = 0.0;
  double beta0_bound_headline = 0.0;  // one significant figure
  double phi0_wrapped = 0.0;          // φ₀ used by the solve
  double phi0_computed = 0.0;         // φ₀ from the plan parameters
  bool phi0_overridden = false;
  double dphi_per_beta0 = 0.0;        // δφ is exactly linear in β₀
  double dphi_at_bound = 0.0;
  double delta_population_at_bound = 0.0;
  double roundtrip_relative_error = 0.0;
  double closed_form_bound = 0.0;
  double bisection_bound = 0.0;
  double method_relative_difference = 0.0;
  Regime regime = Regime::linear;
  bool wrap_limited = false;  // δφ at the bound exceeds π/4
  std::vector<SensitivityRow> sensitivity;
  std::vector<std::string> discrepancy_notes;
};

// Smallest β₀ > 0 with |δP_r(β₀)| = ε. Throws DomainError for ε ∉ (0, 1).
BoundReport solve_beta0_bound(const protocol::PulsePlan& plan, double accuracy,
                              const BoundOptions& options = {});
BoundReport solve_beta0_bound(const SpeciesSpec& spec, double accuracy,
                              const units::PhysicalConstants& constants,
                              const BoundOptions& options = {});

struct Table1Row {
  SpeciesSpec spec;
  BoundReport report;
  bool agreement = false;  // within one decade of the claimed bound
  // Alternatives reported next to the headline, never substituted.
  std::vector<std::pair<std::string, BoundReport>> alternatives;
};

std::vector<Table1Row> table1(const Catalog& catalog, double accuracy,
                              const units::PhysicalConstants& constants);

bool within_one_decade(double value, double claimed);

// Phase sensitivity to the constant table.
struct ConstantSensitivity {
  std::string constant;
  double relative_uncertainty = 0.0;
  double dphi_dlog = 0.0;          // ∂φ/∂ln(constant), analytic
  double dphi_dlog_numeric = 0.0;  // finite difference at working precision
  double ddphi_dlog = 0.0;         // ∂δφ/∂ln(constant)
  double phase_uncertainty = 0.0;  // |∂φ/∂ln c|·σ
  // Relative change of this constant alone that moves the wrapped phase onto
  // the reference (nearest branch); empty without a reference.
  std::optional<double> needed_for_phi;
  std::optional<double> needed_for_dphi;
  bool reachable = false;  // |needed_for_phi| ≤ σ and |needed_for_dphi| ≤ σ
};

struct PhaseSensitivity {
  std::vector<ConstantSensitivity> rows;
  double phi_wrapped = 0.0;
  double dphi_wrapped = 0.0;
  // Quadrature sums of |∂/∂ln c|·σ over the table, rad.
  double combined_phi_uncertainty = 0.0;
  double combined_dphi_uncertainty = 0.0;
  std::optional<ReferencePhases> reference;
  double phi_distance = 0.0;   // |wrap(φ_ref − φ)|, rad
  double dphi_distance = 0.0;  // |wrap(δφ_ref − δφ)|, rad
  bool phi_reachable = false;
  bool dphi_reachable = false;
};

PhaseSensitivity phase_sensitivity(const protocol::PulsePlan& plan,
                                   const std::optional<ReferencePhases>& reference,
                                   unsigned precision_bits = units::kDefaultPrecisionBits);

}  // namespace gupsim::bounds
