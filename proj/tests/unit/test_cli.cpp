#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gupsim/cli.hpp"
#include "gupsim/error.hpp"
#include "gupsim/fock.hpp"

using namespace gupsim;
using Json = nlohmann::json;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream f(p, std::ios::binary);
  f << text;
  return p;
}

}  // namespace

TEST_CASE("minimal species-only config takes defaults") {
  const cli::RunConfig c = cli::parse_config(R"({"species": "Yb171"})");
  CHECK(c.species == "Yb171");
  CHECK(c.numeric.dim == 64);
  CHECK(c.numeric.precision_bits == 256);
  CHECK(c.numeric.accuracy == 1e-5);
  CHECK(c.format == cli::Format::json);
  CHECK(c.settings_provenance.at("numeric.dim") == "default");

  const cli::ResolvedPlan rp = cli::resolve_plan(c);
  CHECK(rp.plan.inputs.beta0 == 1e33);
  CHECK(rp.provenance.at("mass_u") == "catalog");
  CHECK(rp.provenance.at("beta0") == "catalog");
  CHECK(rp.reference.has_value());
}

TEST_CASE("unknown config keys are rejected by path") {
  try {
    cli::parse_config(R"({"species": "Yb171", "colour": 1})");
    FAIL("accepted");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "colour");
  }
  try {
    cli::parse_config(R"({"species": "Yb171", "numeric": {"dimm": 3}})");
    FAIL("accepted");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "numeric.dimm");
  }
  CHECK_THROWS_AS(cli::parse_config(R"({"species": 3})"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("not json"), ConfigError);
}

TEST_CASE("exactly one plan source") {
  CHECK_THROWS_AS(
      cli::parse_config(R"({"species": "Yb171", "plan": {"units": "natural", "kappa": 1, "cycles": 1}})"),
      ConfigError);
  CHECK_THROWS_AS(cli::resolve_plan(cli::parse_config("{}")), ConfigError);
  CHECK_THROWS_AS(
      cli::parse_config(R"({"plan": {"units": "natural", "kappa": 1, "cycles": 1}, "overrides": {}})"),
      ConfigError);
}

TEST_CASE("overriding the mass marks it as user-provided") {
  const cli::RunConfig c =
      cli::parse_config(R"({"species": "Yb171", "overrides": {"mass_u": 170.936}})");
  const cli::ResolvedPlan rp = cli::resolve_plan(c);
  CHECK(rp.provenance.at("mass_u") == "user");
  CHECK(rp.provenance.at("trap_freq_over_2pi_hz") == "catalog");
  CHECK(rp.plan.inputs.mass_u == 170.936);

  const auto out = run({"phase", "--config",
                        temp_file("gupsim_mass.json", R"({"species": "Yb171", "overrides": {"mass_u": 170.936}})")
                            .string()});
  REQUIRE(out.status == 0);
  CHECK(Json::parse(out.out)["provenance"]["mass_u"] == "user");
}

TEST_CASE("explicit plans") {
  const auto c = cli::parse_config(R"({"plan": {"units": "natural", "kappa": 0.5, "beta": 0, "cycles": 2}})");
  const auto rp = cli::resolve_plan(c);
  CHECK(rp.plan.cycles() == 2);
  CHECK(rp.provenance.at("kappa") == "user");
  CHECK_THROWS_AS(cli::parse_config(R"({"plan": {"units": "furlongs"}})"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(
                      R"({"plan": {"units": "SI", "mass_u": 1, "trap_freq_over_2pi_hz": 1, "pulse_duration_s": 1,
                       "rabi1_rad_per_s": 1, "rabi2_rad_per_s": 1, "detuning_rad_per_s": 1,
                       "dk_over_k": 1, "cycles": 1}})"),
                  ConfigError);
}

TEST_CASE("bound subcommand") {
  const auto json = run({"bound", "--species", "Yb171", "--accuracy", "1e-5"});
  REQUIRE(json.status == 0);
  const Json j = Json::parse(json.out);
  CHECK(j["bound"]["beta0_bound"].get<double>() > 1e23);
  CHECK(j["bound"]["beta0_bound"].get<double>() < 1e25);
  CHECK(j["agreement"] == true);
  CHECK(j.contains("conventions"));

  const auto csv = run({"bound", "--species", "Yb171", "--format", "csv"});
  REQUIRE(csv.status == 0);
  CHECK(csv.out.rfind(
            "species,lambda_nm,N,nu_over_2pi_hz,dk_over_k,phi0_wrapped,regime,beta0_bound,claimed_bound,"
            "agreement\nYb171,369.5,1944000000,",
            0) == 0);
}

TEST_CASE("table1 subcommand") {
  const auto r = run({"table1", "--format", "csv"});
  REQUIRE(r.status == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
  const auto j = run({"table1"});
  CHECK(Json::parse(j.out)["rows"].size() == 3);
}

TEST_CASE("phase reports are deterministic") {
  const auto a = run({"phase", "--species", "Yb171", "--beta0", "1e33"});
  const auto b = run({"phase", "--species", "Yb171", "--beta0", "1e33"});
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  const Json j = Json::parse(a.out);
  for (const char* k : {"phi0_unwrapped", "dphi_unwrapped", "phi_unwrapped", "phi0_wrapped",
                        "dphi_wrapped", "phi_wrapped"}) {
    CHECK(j["phase"].contains(k));
  }
  CHECK(j["sensitivity"]["rows"].size() == 4);
  CHECK(j["alternatives"].size() == 1);
}

TEST_CASE("simulate subcommand") {
  const auto cfg = temp_file("gupsim_sim.json",
                             R"({"plan": {"units": "natural", "kappa": 0.5, "beta": 0, "cycles": 2}})");
  const auto dump = std::filesystem::temp_directory_path() / "gupsim_sim_op.bin";
  const auto r = run({"simulate", "--config", cfg.string(), "--dim", "32", "--dump-operator",
                      dump.string()});
  REQUIRE(r.status == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["simulation"]["checks_passed"] == true);
  CHECK(j["simulation"]["interior_distance_to_closed_form_scalar"].get<double>() < 1e-6);
  std::ifstream f(dump, std::ios::binary);
  const auto op = fock::read_operator(f);
  CHECK(op.dim() == 32);
  std::filesystem::remove(dump);

  // Catalog species have far too many cycles to propagate explicitly.
  CHECK(run({"simulate", "--species", "Yb171"}).status == cli::kExitUsage);
}

TEST_CASE("exit statuses") {
  CHECK(run({}).status == cli::kExitUsage);
  CHECK(run({"frobnicate"}).status == cli::kExitUsage);
  CHECK(run({"phase"}).status == cli::kExitUsage);
  CHECK(run({"phase", "--species", "Nope"}).status == cli::kExitUsage);
  CHECK(run({"phase", "--species", "Yb171", "--format", "csv"}).status == cli::kExitUsage);
  CHECK(run({"bound", "--species", "Yb171", "--accuracy", "2"}).status == cli::kExitUsage);
  CHECK(run({"phase", "--species", "Yb171", "--dim", "3"}).status == cli::kExitUsage);
  CHECK(run({"phase", "--help"}).status == cli::kExitOk);
  CHECK(run({"phase", "--config", "/nonexistent/config.json"}).status == cli::kExitUsage);
  // 64 bits cannot reduce a phase of ~1e18 rad.
  const auto p = run({"phase", "--species", "Yb171", "--cycles", "1000000000000000",
                      "--precision-bits", "64"});
  CHECK(p.status == cli::kExitPhysics);
  CHECK(p.err.find("precision") != std::string::npos);
}

TEST_CASE("output file and mode mismatch") {
  const auto out = std::filesystem::temp_directory_path() / "gupsim_bound_out.json";
  REQUIRE(run({"bound", "--species", "Yb171", "--output", out.string()}).status == 0);
  CHECK(std::filesystem::file_size(out) > 100);
  std::filesystem::remove(out);
  const auto cfg = temp_file("gupsim_mode.json", R"({"mode": "bound", "species": "Yb171"})");
  CHECK(run({"phase", "--config", cfg.string()}).status == cli::kExitUsage);
  CHECK(run({"bound", "--config", cfg.string()}).status == cli::kExitOk);
}

TEST_CASE("shipped example configs load and resolve") {
  int seen = 0;
  for (const auto& e : std::filesystem::directory_iterator(GUPSIM_CONFIG_DIR)) {
    if (e.path().extension() != ".json") continue;
    CAPTURE(e.path().string());
    const auto c = cli::load_config(e.path());
    CHECK(c.mode.has_value());
    CHECK_NOTHROW(cli::resolve_plan(c));
    ++seen;
  }
  CHECK(seen >= 3);
}
