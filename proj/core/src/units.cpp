#include "gupsim/units.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

#include "gupsim/error.hpp"

namespace gupsim::units {

PhysicalConstants PhysicalConstants::natural() {
  return PhysicalConstants{"1", "1", "1", "1", 1.0, 1.0, 1.0, 1.0, "natural"};
}

PhysicalConstants pinned_constants() {
  // CODATA 2018. ħ is h/2π with h exact; the decimal below is the published
  // truncation of that exact value.
  return PhysicalConstants{
      "1.054571817e-34", "299792458", "2.176434e-8", "1.66053906660e-27",
      1.054571817e-34,   299792458.0, 2.176434e-8,  1.66053906660e-27,
      "CODATA-2018"};
}

ConstantUncertainties pinned_uncertainties() {
  // ħ: truncation of the exact value; c: exact; M_p: 2.176434(24)e-8;
  // u: 1.66053906660(50)e-27.
  return ConstantUncertainties{6.2e-10, 0.0, 1.1e-5, 3.0e-10};
}

OscillatorScales OscillatorScales::natural() {
  const double s = 1.0 / std::sqrt(2.0);
  return OscillatorScales{s, s, 1.0, 1.0, 1.0};
}

OscillatorScales oscillator_scales(double mass, double trap_freq,
                                   const PhysicalConstants& constants) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw DomainError("oscillator_scales: mass must be positive");
  }
  if (!(trap_freq > 0.0) || !std::isfinite(trap_freq)) {
    throw DomainError("oscillator_scales: trap frequency must be positive");
  }
  const double hbar = constants.hbar;
  return OscillatorScales{std::sqrt(hbar / (2.0 * mass * trap_freq)),
                          std::sqrt(hbar * mass * trap_freq / 2.0), mass, trap_freq,
                          hbar};
}

// ---------------------------------------------------------------------------
// BigFloat

namespace {

mpfr_prec_t checked_precision(unsigned bits) {
  if (bits < 2 || bits > 1u << 20) {
    throw DomainError("BigFloat: unsupported precision " + std::to_string(bits));
  }
  return static_cast<mpfr_prec_t>(bits);
}

}  // namespace

BigFloat::BigFloat(unsigned precision_bits) {
  mpfr_init2(value_, checked_precision(precision_bits));
  mpfr_set_zero(value_, 1);
}

BigFloat::BigFloat(double value, unsigned precision_bits) {
  mpfr_init2(value_, checked_precision(precision_bits));
  mpfr_set_d(value_, value, MPFR_RNDN);
}

BigFloat::BigFloat(std::int64_t value, unsigned precision_bits) {
  mpfr_init2(value_, checked_precision(precision_bits));
  mpfr_set_sj(value_, value, MPFR_RNDN);
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(value_); }

BigFloat BigFloat::from_decimal(std::string_view text, unsigned precision_bits) {
  BigFloat out(precision_bits);
  const std::string owned(text);
  char* end = nullptr;
  if (!owned.empty()) {
    mpfr_strtofr(out.value_, owned.c_str(), &end, 10, MPFR_RNDN);
  }
  if (end == nullptr || end == owned.c_str() || *end != '\0') {
    throw DomainError("BigFloat: not a decimal number: '" + owned + "'");
  }
  return out;
}

BigFloat BigFloat::from_double_decimal(double value, unsigned precision_bits) {
  if (!std::isfinite(value)) {
    throw DomainError("BigFloat: non-finite input");
  }
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) {
    throw DomainError("BigFloat: could not format double");
  }
  return from_decimal(std::string_view(buffer, static_cast<std::size_t>(ptr - buffer)),
                      precision_bits);
}

BigFloat BigFloat::pi(unsigned precision_bits) {
  BigFloat out(precision_bits);
  mpfr_const_pi(out.value_, MPFR_RNDN);
  return out;
}

unsigned BigFloat::precision() const {
  return static_cast<unsigned>(mpfr_get_prec(value_));
}

double BigFloat::to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }

long double BigFloat::to_long_double() const { return mpfr_get_ld(value_, MPFR_RNDN); }

std::string BigFloat::to_decimal(int digits) const {
  if (mpfr_zero_p(value_)) {
    return "0";
  }
  digits = std::max(digits, 1);
  const int needed = mpfr_snprintf(nullptr, 0, "%.*Re", digits - 1, value_);
  std::string out(static_cast<std::size_t>(needed) + 1, '\0');
  mpfr_snprintf(out.data(), out.size(), "%.*Re", digits - 1, value_);
  out.resize(static_cast<std::size_t>(needed));
  return out;
}

bool BigFloat::is_finite() const { return mpfr_number_p(value_) != 0; }
bool BigFloat::is_zero() const { return mpfr_zero_p(value_) != 0; }
int BigFloat::sign() const { return mpfr_sgn(value_); }

#define GUPSIM_UNARY(name, fn)                 \
  BigFloat BigFloat::name() const {            \
    BigFloat out(precision());                 \
    fn(out.value_, value_, MPFR_RNDN);         \
    return out;                                \
  }

GUPSIM_UNARY(abs, mpfr_abs)
GUPSIM_UNARY(sqrt, mpfr_sqrt)
GUPSIM_UNARY(cos, mpfr_cos)
GUPSIM_UNARY(sin, mpfr_sin)
GUPSIM_UNARY(acos, mpfr_acos)
GUPSIM_UNARY(asin, mpfr_asin)
GUPSIM_UNARY(log, mpfr_log)
#undef GUPSIM_UNARY

BigFloat BigFloat::rounded_to_integer() const {
  BigFloat out(precision());
  mpfr_round(out.value_, value_);
  return out;
}

BigFloat BigFloat::pow(long exponent) const {
  BigFloat out(precision());
  mpfr_pow_si(out.value_, value_, exponent, MPFR_RNDN);
  return out;
}

BigFloat BigFloat::with_precision(unsigned precision_bits) const {
  BigFloat out(precision_bits);
  mpfr_set(out.value_, value_, MPFR_RNDN);
  return out;
}

void BigFloat::widen_to(unsigned precision_bits) {
  if (precision_bits > precision()) {
    mpfr_prec_round(value_, static_cast<mpfr_prec_t>(precision_bits), MPFR_RNDN);
  }
}

BigFloat& BigFloat::operator+=(const BigFloat& rhs) {
  widen_to(rhs.precision());
  mpfr_add(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator-=(const BigFloat& rhs) {
  widen_to(rhs.precision());
  mpfr_sub(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator*=(const BigFloat& rhs) {
  widen_to(rhs.precision());
  mpfr_mul(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator/=(const BigFloat& rhs) {
  widen_to(rhs.precision());
  mpfr_div(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigFloat BigFloat::operator-() const {
  BigFloat out(precision());
  mpfr_neg(out.value_, value_, MPFR_RNDN);
  return out;
}

bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.value_, b.value_) != 0; }
bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }

// ---------------------------------------------------------------------------
// BigAngle

namespace {

struct Rational {
  std::int64_t num;
  std::int64_t den;
};

Rational normalized(__int128 num, __int128 den) {
  if (den == 0) {
    throw DomainError("BigAngle: zero denominator");
  }
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 a = num < 0 ? -num : num;
  __int128 b = den;
  while (b != 0) {
    const __int128 r = a % b;
    a = b;
    b = r;
  }
  const __int128 g = a == 0 ? den : a;
  num /= g;
  den /= g;
  constexpr __int128 limit = INT64_MAX;
  if (num > limit || num < -limit || den > limit) {
    throw DomainError("BigAngle: rational multiple of pi overflows");
  }
  return {static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

}  // namespace

BigAngle::BigAngle(BigFloat radians, std::int64_t pi_numerator, std::int64_t pi_denominator)
    : radians_(std::move(radians)) {
  const Rational r = normalized(pi_numerator, pi_denominator);
  pi_num_ = r.num;
  pi_den_ = r.den;
}

BigAngle BigAngle::pi_multiple(std::int64_t numerator, std::int64_t denominator,
                               unsigned precision_bits) {
  return BigAngle(BigFloat(precision_bits), numerator, denominator);
}

BigFloat BigAngle::value() const {
  BigFloat out = BigFloat::pi(precision_bits());
  out *= BigFloat(pi_num_, precision_bits());
  out /= BigFloat(pi_den_, precision_bits());
  out += radians_;
  return out;
}

BigAngle BigAngle::operator+(const BigAngle& rhs) const {
  const Rational r = normalized(static_cast<__int128>(pi_num_) * rhs.pi_den_ +
                                    static_cast<__int128>(rhs.pi_num_) * pi_den_,
                                static_cast<__int128>(pi_den_) * rhs.pi_den_);
  return BigAngle(radians_ + rhs.radians_, r.num, r.den);
}

BigAngle BigAngle::operator-() const { return BigAngle(-radians_, -pi_num_, pi_den_); }

WrappedAngle wrap_phase(const BigAngle& angle) {
  const BigFloat& x = angle.radians_part();
  if (!x.is_finite()) {
    throw DomainError("wrap_phase: angle is not finite");
  }
  const unsigned bits = angle.precision_bits();
  const BigFloat pi = BigFloat::pi(bits);
  const BigFloat two_pi = pi * BigFloat(2.0, bits);

  // Rational part reduced exactly into (−1, 1] turns of π.
  const std::int64_t den = angle.pi_denominator();
  std::int64_t m = angle.pi_numerator() % (2 * den);
  if (m < 0) m += 2 * den;
  if (m > den) m -= 2 * den;

  // Remainder: x − k·2π with k = round(x / 2π); fms keeps a single rounding.
  BigFloat k = (x / two_pi).rounded_to_integer();
  BigFloat rem(bits);
  mpfr_fms(rem.get(), k.get(), two_pi.get(), x.get(), MPFR_RNDN);
  rem = -rem;

  BigFloat total = rem;
  if (m != 0) {
    total += pi * BigFloat(m, bits) / BigFloat(den, bits);
  }
  if (total > pi) {
    total -= two_pi;
  } else if (total <= -pi) {
    total += two_pi;
  }

  double error = 0.0;
  if (!x.is_zero() || m != 0) {
    // π rounding scaled by |k| (≈ |x|/2π turns) plus a handful of roundings of
    // quantities bounded by 2π.
    const double ulp_scale = std::ldexp(1.0, 1 - static_cast<int>(bits));
    error = ulp_scale * (x.abs().to_double() + 16.0);
  }
  if (error > kMaxWrapError) {
    throw PrecisionError("wrap_phase: error bound " + std::to_string(error) +
                         " rad exceeds limit at " + std::to_string(bits) +
                         " bits; raise precision");
  }
  WrappedAngle out{total, total.to_double(), error};
  return out;
}

}  // namespace gupsim::units
