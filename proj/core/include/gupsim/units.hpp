#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <mpfr.h>

namespace gupsim::units {

inline constexpr unsigned kDefaultPrecisionBits = 256;

// Physical constants as exact decimal text plus their nearest doubles.
// The decimal text is what the extended-precision path parses, so a constant
// table is fully described by its strings.
struct PhysicalConstants {
  std::string_view hbar_text;              // J s
  std::string_view c_text;                 // m/s
  std::string_view planck_mass_text;       // kg
  std::string_view atomic_mass_unit_text;  // kg
  double hbar = 0.0;
  double c = 0.0;
  double planck_mass = 0.0;
  double atomic_mass_unit = 0.0;
  std::string_view name;

  // ħ = c = M_p = u = 1; used by the Fock-space oracles.
  static PhysicalConstants natural();

  bool operator==(const PhysicalConstants&) const = default;
};

// CODATA 2018 recommended values.
PhysicalConstants pinned_constants();

// Relative standard uncertainties of the CODATA 2018 table (0 for exact values).
struct ConstantUncertainties {
  double hbar = 0.0;
  double c = 0.0;
  double planck_mass = 0.0;
  double atomic_mass_unit = 0.0;
};
ConstantUncertainties pinned_uncertainties();

struct OscillatorScales {
  double x0 = 0.0;         // sqrt(ħ / 2 m ν), m
  double p0 = 0.0;         // sqrt(ħ m ν / 2), kg m/s
  double mass = 0.0;       // kg
  double trap_freq = 0.0;  // rad/s
  double hbar = 0.0;

  // x0 = p0 = 1/sqrt(2), ħ = m = ν = 1.
  static OscillatorScales natural();
};

OscillatorScales oscillator_scales(double mass, double trap_freq,
                                   const PhysicalConstants& constants);

// Owning MPFR float. Every value carries its own precision; binary operations
// produce the larger of the two operand precisions, rounded to nearest.
class BigFloat {
 public:
  explicit BigFloat(unsigned precision_bits = kDefaultPrecisionBits);
  BigFloat(double value, unsigned precision_bits);
  BigFloat(std::int64_t value, unsigned precision_bits);
  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  // Parses decimal text exactly rounded to the requested precision.
  static BigFloat from_decimal(std::string_view text, unsigned precision_bits);
  // Shortest round-trip decimal of `value` (so 0.56e-6 enters as 5.6e-07).
  static BigFloat from_double_decimal(double value, unsigned precision_bits);
  // Correctly rounded π.
  static BigFloat pi(unsigned precision_bits);

  unsigned precision() const;
  double to_double() const;
  long double to_long_double() const;
  // Scientific notation with `digits` significant digits.
  std::string to_decimal(int digits) const;
  bool is_finite() const;
  bool is_zero() const;
  int sign() const;

  BigFloat abs() const;
  BigFloat rounded_to_integer() const;  // ties away from zero
  BigFloat sqrt() const;
  BigFloat cos() const;
  BigFloat sin() const;
  BigFloat acos() const;
  BigFloat asin() const;
  BigFloat log() const;
  BigFloat pow(long exponent) const;
  BigFloat with_precision(unsigned precision_bits) const;

  BigFloat& operator+=(const BigFloat& rhs);
  BigFloat& operator-=(const BigFloat& rhs);
  BigFloat& operator*=(const BigFloat& rhs);
  BigFloat& operator/=(const BigFloat& rhs);
  BigFloat operator-() const;

  friend BigFloat operator+(BigFloat lhs, const BigFloat& rhs) { return lhs += rhs; }
  friend BigFloat operator-(BigFloat lhs, const BigFloat& rhs) { return lhs -= rhs; }
  friend BigFloat operator*(BigFloat lhs, const BigFloat& rhs) { return lhs *= rhs; }
  friend BigFloat operator/(BigFloat lhs, const BigFloat& rhs) { return lhs /= rhs; }

  friend bool operator<(const BigFloat& a, const BigFloat& b);
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return b < a; }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return !(b < a); }
  friend bool operator>=(const BigFloat& a, const BigFloat& b) { return !(a < b); }
  friend bool operator==(const BigFloat& a, const BigFloat& b);

  mpfr_srcptr get() const { return value_; }
  mpfr_ptr get() { return value_; }

 private:
  void widen_to(unsigned precision_bits);
  mpfr_t value_;
  bool owns_ = false;
};

// Angle held at extended precision: an exact rational multiple of π plus a
// BigFloat remainder in radians. Schedule-derived angles (νt_i = iπ/2) live in
// the rational part and are reduced exactly.
class BigAngle {
 public:
  BigAngle() = default;
  explicit BigAngle(BigFloat radians) : radians_(std::move(radians)) {}
  BigAngle(BigFloat radians, std::int64_t pi_numerator, std::int64_t pi_denominator);

  static BigAngle pi_multiple(std::int64_t numerator, std::int64_t denominator,
                              unsigned precision_bits);

  const BigFloat& radians_part() const { return radians_; }
  std::int64_t pi_numerator() const { return pi_num_; }
  std::int64_t pi_denominator() const { return pi_den_; }
  unsigned precision_bits() const { return radians_.precision(); }

  // Full value as a BigFloat (rational part evaluated with a rounded π).
  BigFloat value() const;

  BigAngle operator+(const BigAngle& rhs) const;
  BigAngle operator-() const;

 private:
  BigFloat radians_;
  std::int64_t pi_num_ = 0;
  std::int64_t pi_den_ = 1;
};

struct WrappedAngle {
  BigFloat value;            // in (−π, π] at the working precision
  double radians = 0.0;      // `value` rounded to double
  double error_bound = 0.0;  // bound on |value − exact reduction|
};

inline constexpr double kMaxWrapError = 1e-6;

// Reduces to (−π, π]. Throws PrecisionError when the reduction error bound
// exceeds kMaxWrapError; the caller must raise precision.
WrappedAngle wrap_phase(const BigAngle& angle);

}  // namespace gupsim::units
