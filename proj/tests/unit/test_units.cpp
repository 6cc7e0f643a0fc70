#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gupsim/error.hpp"
#include "gupsim/units.hpp"

using namespace gupsim;
using units::BigAngle;
using units::BigFloat;

TEST_CASE("pinned constants carry the CODATA 2018 values") {
  const units::PhysicalConstants c = units::pinned_constants();
  CHECK(c.hbar == 1.054571817e-34);
  CHECK(c.planck_mass == 2.176434e-8);
  CHECK(c.c == 299792458.0);
  CHECK(c.hbar_text == "1.054571817e-34");
  CHECK(units::pinned_uncertainties().c == 0.0);
}

TEST_CASE("oscillator scales") {
  const auto n = units::OscillatorScales::natural();
  CHECK(n.x0 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(n.p0 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

  const auto c = units::pinned_constants();
  const double m = 173.04 * c.atomic_mass_unit;
  const double nu = 0.18e6 * 2.0 * std::numbers::pi;
  const auto yb = units::oscillator_scales(m, nu, c);
  CHECK(yb.x0 * yb.p0 == doctest::Approx(c.hbar / 2.0).epsilon(1e-14));

  const auto heavy = units::oscillator_scales(4.0 * m, nu, c);
  CHECK(heavy.x0 == doctest::Approx(yb.x0 / 2.0).epsilon(1e-14));

  CHECK_THROWS_AS(units::oscillator_scales(-1.0, nu, c), DomainError);
  CHECK_THROWS_AS(units::oscillator_scales(m, 0.0, c), DomainError);
}

TEST_CASE("BigFloat parses decimal text at full precision") {
  const BigFloat third = BigFloat::from_decimal("1", 256) / BigFloat::from_decimal("3", 256);
  CHECK(third.precision() == 256);
  CHECK(third.to_decimal(30).substr(0, 12) == "3.3333333333");
  const BigFloat a = BigFloat::from_decimal("0.1", 512);
  CHECK(a.to_double() == 0.1);
  CHECK(BigFloat::from_double_decimal(0.56e-6, 256) == BigFloat::from_decimal("5.6e-7", 256));
  CHECK_THROWS(BigFloat::from_decimal("abc", 64));
}

TEST_CASE("wrap_phase") {
  SUBCASE("zero") {
    const auto w = units::wrap_phase(BigAngle(BigFloat(0.0, 256)));
    CHECK(w.radians == 0.0);
    CHECK(w.error_bound == 0.0);
  }
  SUBCASE("exact odd multiple of pi maps to pi") {
    const auto w = units::wrap_phase(BigAngle::pi_multiple(5, 1, 256));
    CHECK(w.value == BigFloat::pi(256));
  }
  SUBCASE("exact negative odd multiple maps to +pi") {
    const auto w = units::wrap_phase(BigAngle::pi_multiple(-3, 1, 256));
    CHECK(w.radians == doctest::Approx(std::numbers::pi));
  }
  SUBCASE("large angle against a 1024-bit reduction") {
    const auto big = [](unsigned bits) {
      return BigAngle(BigFloat::from_decimal("3.7e12", bits) +
                      BigFloat::from_decimal("0.123456789", bits));
    };
    const auto w = units::wrap_phase(big(256));
    const auto ref = units::wrap_phase(big(1024));
    CHECK(w.error_bound < 1e-50);
    const BigFloat diff = (w.value.with_precision(1024) - ref.value).abs();
    CHECK(diff.to_double() < 1e-50);
    CHECK(w.value > -BigFloat::pi(256));
    CHECK(w.value <= BigFloat::pi(256));
  }
  SUBCASE("insufficient precision is reported") {
    CHECK_THROWS_AS(units::wrap_phase(BigAngle(BigFloat::from_decimal("1e30", 64))),
                    PrecisionError);
  }
}

TEST_CASE("BigAngle keeps schedule angles rational") {
  const BigAngle a = BigAngle::pi_multiple(3, 2, 128) + BigAngle::pi_multiple(1, 2, 128);
  const auto w = units::wrap_phase(a);
  CHECK(std::abs(w.radians) < 1e-30);
}
