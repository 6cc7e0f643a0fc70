#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gupsim/units.hpp"

namespace gupsim::verify {

struct VerifyOptions {
  bool quick = false;  // reduced dimensions and sweeps
  unsigned precision_bits = units::kDefaultPrecisionBits;
  std::optional<std::filesystem::path> catalog;  // default_catalog_path() when empty
};

struct SuiteResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string summary;     // one line, human readable
  std::string data_json;   // serialized measurement object
  double runtime_seconds = 0.0;
  double budget_seconds = 0.0;
};

inline constexpr int kSuiteCount = 9;

std::string_view suite_name(int id);
double suite_budget_seconds(int id);

// Throws DomainError for an id outside 1..kSuiteCount.
SuiteResult run_suite(int id, const VerifyOptions& options);
std::vector<SuiteResult> run_all(const VerifyOptions& options);

// Deterministic report: sorted keys, no wall-clock data.
std::string report_json(const std::vector<SuiteResult>& results, const VerifyOptions& options);

}  // namespace gupsim::verify
