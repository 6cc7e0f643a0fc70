#include <doctest.h>

#include <fstream>
#include <sstream>

#include "gupsim/cli.hpp"

TEST_CASE("phase report for Yb171 matches the frozen golden file") {
  std::ifstream f(GUPSIM_GOLDEN_DIR "/phase_yb171.json", std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream expected;
  expected << f.rdbuf();

  std::ostringstream out, err;
  const int status = gupsim::cli::run({"phase", "--species", "Yb171", "--beta0", "1e33"}, out, err);
  REQUIRE(status == 0);
  CHECK(out.str() == expected.str());
}
