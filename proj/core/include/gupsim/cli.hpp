#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gupsim/bounds.hpp"
#include "gupsim/fock.hpp"
#include "gupsim/protocol.hpp"
#include "gupsim/units.hpp"

namespace gupsim::cli {

enum class Mode { phase, simulate, verify, bound, table1 };
enum class Format { json, csv };
enum class Units { si, natural };

std::string_view to_string(Mode m);

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPhysics = 1;  // failed physics check or precision/convergence failure
inline constexpr int kExitUsage = 2;    // bad flags or malformed config

// Per-field replacements on top of a species row. Keys in the config file:
// mass_u, trap_freq_over_2pi_hz, pulse_duration_s, rabi1_rad_per_s,
// rabi2_rad_per_s, detuning_rad_per_s, wavelength_nm, k_over_2pi_per_m,
// dk_over_k, cycles, beta0.
struct PlanOverrides {
  std::optional<double> mass_u;
  std::optional<double> trap_freq_over_2pi_hz;
  std::optional<double> pulse_duration_s;
  std::optional<double> rabi1;
  std::optional<double> rabi2;
  std::optional<double> detuning;
  std::optional<double> wavelength_nm;
  std::optional<double> k_over_2pi;
  std::optional<double> dk_over_k;
  std::optional<std::uint64_t> cycles;
  std::optional<double> beta0;
};

// A plan given field by field instead of by species name.
struct ExplicitPlan {
  Units units = Units::si;
  protocol::PlanInputs si;  // units = si
  double kappa = 0.0;       // units = natural: κ = X·x0
  double beta = 0.0;        // units = natural
  std::uint64_t cycles = 0;
};

struct NumericSettings {
  fock::Index dim = 64;
  unsigned precision_bits = units::kDefaultPrecisionBits;
  double accuracy = 1e-5;
  double truncation_rel_tol = fock::kTruncationRelTol;
  double closure_tol = 1e-6;
};

struct RunConfig {
  std::optional<Mode> mode;
  std::optional<std::string> species;  // exactly one of species / plan
  std::optional<ExplicitPlan> plan;
  PlanOverrides overrides;
  protocol::PlanOptions options;
  std::optional<std::filesystem::path> catalog;
  NumericSettings numeric;
  std::optional<std::filesystem::path> output;
  Format format = Format::json;
  bool quick = false;
  // "default" or "user" for every numeric and output setting.
  std::map<std::string, std::string> settings_provenance;
};

// Strict schema: unknown keys and type errors throw ConfigError naming the field.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

// A plan with the origin of every physical input: "catalog", "user" or "default".
struct ResolvedPlan {
  protocol::PulsePlan plan;
  std::optional<bounds::SpeciesSpec> species;  // with overrides applied
  std::optional<bounds::ReferencePhases> reference;  // only at the catalog reference β₀
  std::map<std::string, std::string> provenance;
};

// Throws ConfigError when no plan source is given.
ResolvedPlan resolve_plan(const RunConfig& config);

inline constexpr std::uint64_t kMaxSimulatedCycles = 1000;

// `args` excludes the program name. Reports go to `out` unless an output path
// is configured; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace gupsim::cli
