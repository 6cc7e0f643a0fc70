#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gupsim/units.hpp"

namespace gupsim::fock {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Dense operator on the truncated number basis |0>, ..., |D-1>.
class FockOperator {
 public:
  FockOperator() = default;
  // Throws DomainError unless `entries` is square, non-empty and finite.
  explicit FockOperator(Matrix entries);

  static FockOperator identity(Index dim);
  static FockOperator zero(Index dim);

  Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }

  FockOperator adjoint() const;
  // ‖M − M†‖ ≤ rel_tol·‖M‖ (Frobenius).
  bool is_hermitian(double rel_tol = 1e-12) const;
  bool is_skew_hermitian(double rel_tol = 1e-10) const;
  // Compression onto phonon numbers 0..n_max.
  FockOperator interior(Index n_max) const;

  FockOperator& operator+=(const FockOperator& rhs);
  FockOperator& operator-=(const FockOperator& rhs);
  FockOperator& operator*=(Complex s);

  friend FockOperator operator+(FockOperator a, const FockOperator& b) { return a += b; }
  friend FockOperator operator-(FockOperator a, const FockOperator& b) { return a -= b; }
  friend FockOperator operator*(const FockOperator& a, const FockOperator& b);
  friend FockOperator operator*(Complex s, FockOperator a) { return a *= s; }
  friend FockOperator operator*(FockOperator a, Complex s) { return a *= s; }
  FockOperator operator-() const { return FockOperator(Matrix(-entries_)); }

 private:
  Matrix entries_;
};

class UnitaryOperator {
 public:
  UnitaryOperator() = default;
  // Records ‖U†U − 1‖_F; callers decide whether the defect is acceptable.
  explicit UnitaryOperator(Matrix entries);

  static UnitaryOperator identity(Index dim);

  Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }
  double unitarity_defect() const { return defect_; }
  FockOperator as_operator() const { return FockOperator(entries_); }

  // Composition; `later * earlier` applies `earlier` first.
  friend UnitaryOperator operator*(const UnitaryOperator& later,
                                   const UnitaryOperator& earlier);

 private:
  Matrix entries_;
  double defect_ = 0.0;
};

inline constexpr double kMaxUnitarityDefect = 1e-10;

struct Ladder {
  FockOperator a;
  FockOperator adag;
};

// a[n-1, n] = sqrt(n). Throws DomainError for dim < 2.
Ladder ladder(Index dim);

struct Quadratures {
  FockOperator x;
  FockOperator p;
};

// x = x0 (a + a†), p = i p0 (a† − a).
Quadratures quadratures(Index dim, const units::OscillatorScales& scales);

FockOperator commutator(const FockOperator& a, const FockOperator& b);

// e^G for skew-Hermitian G, through the Hermitian eigendecomposition of iG.
UnitaryOperator expm_generator(const FockOperator& generator);

// e^{i s H} for Hermitian H.
UnitaryOperator expm_i_hermitian(const FockOperator& hermitian, double s);

enum class Norm { spectral, frobenius };

double norm(const FockOperator& op, Norm mode = Norm::spectral);
double op_distance(const FockOperator& a, const FockOperator& b, Norm mode = Norm::spectral);

// Debug dump: 8-byte magic "GUPSIMOP", uint64 LE dimension, then row-major
// (re, im) pairs as little-endian float64.
void write_operator(std::ostream& out, const FockOperator& op);
FockOperator read_operator(std::istream& in);

// Doubling policy for the truncation dimension: evaluate `target(D)` for
// D, 2D, 4D, ... and accept D once the next doubling changes the value by
// less than `rel_tol` (relative). Throws ConvergenceError past `cap`.
struct ConvergedValue {
  Index dim = 0;
  double value = 0.0;
  std::vector<std::pair<Index, double>> history;
};

inline constexpr double kTruncationRelTol = 1e-8;
inline constexpr Index kTruncationCap = 1024;

ConvergedValue converge_in_dim(const std::function<double(Index)>& target, Index start_dim,
                               double rel_tol = kTruncationRelTol,
                               Index cap = kTruncationCap);

}  // namespace gupsim::fock
