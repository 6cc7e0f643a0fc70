#pragma once

// JSON and CSV serialization shared by the CLI and the verify runner.

#include <string>
#include <vector>

#include "gupsim/bounds.hpp"
#include "gupsim/protocol.hpp"
#include "gupsim/units.hpp"
#include "json_util.hpp"

namespace gupsim::report {

using detail::Json;

inline constexpr int kDecimalDigits = 40;

std::string decimal(const units::BigFloat& v, int digits = kDecimalDigits);

// Constants as exact decimal text, unit conventions, wrapping convention and
// the list of reading decisions taken where the source formulas disagree.
Json conventions(const units::PhysicalConstants& constants, unsigned precision_bits);
std::vector<std::string> discrepancy_ledger();

Json wrapped(const units::WrappedAngle& a);
Json phase_result(const protocol::PhaseResult& r);
Json plan_inputs(const protocol::PlanInputs& in);
Json bound_report(const bounds::BoundReport& r);
Json phase_sensitivity(const bounds::PhaseSensitivity& s);
Json table1_row(const bounds::Table1Row& row);

// Sorted keys, two-space indent, trailing newline.
std::string dump(const Json& j);

inline constexpr const char* kCsvHeader =
    "species,lambda_nm,N,nu_over_2pi_hz,dk_over_k,phi0_wrapped,regime,beta0_bound,claimed_bound,"
    "agreement";
std::string csv_row(const bounds::SpeciesSpec& spec, const bounds::BoundReport& r, bool agreement);

}  // namespace gupsim::report
