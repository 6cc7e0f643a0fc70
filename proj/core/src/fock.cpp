#include "gupsim/fock.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "gupsim/error.hpp"

namespace gupsim::fock {

namespace {

void require_same_dim(const FockOperator& a, const FockOperator& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw DomainError(std::string(what) + ": dimension mismatch (" +
                      std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
  }
}

double frobenius_defect(const Matrix& u) {
  const Matrix gram = u.adjoint() * u;
  return (gram - Matrix::Identity(u.rows(), u.cols())).norm();
}

}  // namespace

FockOperator::FockOperator(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw DomainError("FockOperator: matrix must be square and non-empty");
  }
  if (!entries_.allFinite()) {
    throw DomainError("FockOperator: non-finite entries");
  }
}

FockOperator FockOperator::identity(Index dim) {
  return FockOperator(Matrix::Identity(dim, dim));
}

FockOperator FockOperator::zero(Index dim) { return FockOperator(Matrix::Zero(dim, dim)); }

FockOperator FockOperator::adjoint() const { return FockOperator(Matrix(entries_.adjoint())); }

bool FockOperator::is_hermitian(double rel_tol) const {
  return (entries_ - entries_.adjoint()).norm() <= rel_tol * entries_.norm();
}

bool FockOperator::is_skew_hermitian(double rel_tol) const {
  return (entries_ + entries_.adjoint()).norm() <= rel_tol * entries_.norm();
}

FockOperator FockOperator::interior(Index n_max) const {
  if (n_max < 0 || n_max >= dim()) {
    throw DomainError("interior: n_max " + std::to_string(n_max) + " outside dimension " +
                      std::to_string(dim()));
  }
  return FockOperator(Matrix(entries_.topLeftCorner(n_max + 1, n_max + 1)));
}

FockOperator& FockOperator::operator+=(const FockOperator& rhs) {
  require_same_dim(*this, rhs, "operator+");
  entries_ += rhs.entries_;
  return *this;
}

FockOperator& FockOperator::operator-=(const FockOperator& rhs) {
  require_same_dim(*this, rhs, "operator-");
  entries_ -= rhs.entries_;
  return *this;
}

FockOperator& FockOperator::operator*=(Complex s) {
  entries_ *= s;
  return *this;
}

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  require_same_dim(a, b, "operator*");
  return FockOperator(Matrix(a.entries_ * b.entries_));
}

UnitaryOperator::UnitaryOperator(Matrix entries)
    : entries_(std::move(entries)), defect_(frobenius_defect(entries_)) {}

UnitaryOperator UnitaryOperator::identity(Index dim) {
  return UnitaryOperator(Matrix::Identity(dim, dim));
}

UnitaryOperator operator*(const UnitaryOperator& later, const UnitaryOperator& earlier) {
  if (later.dim() != earlier.dim()) {
    throw DomainError("UnitaryOperator product: dimension mismatch");
  }
  return UnitaryOperator(Matrix(later.entries_ * earlier.entries_));
}

Ladder ladder(Index dim) {
  if (dim < 2) {
    throw DomainError("ladder: dimension must be at least 2, got " + std::to_string(dim));
  }
  Matrix a = Matrix::Zero(dim, dim);
  for (Index n = 1; n < dim; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  Matrix adag = a.adjoint();
  return Ladder{FockOperator(std::move(a)), FockOperator(std::move(adag))};
}

Quadratures quadratures(Index dim, const units::OscillatorScales& scales) {
  const Ladder l = ladder(dim);
  const Complex i(0.0, 1.0);
  return Quadratures{scales.x0 * (l.a + l.adag), (i * scales.p0) * (l.adag - l.a)};
}

FockOperator commutator(const FockOperator& a, const FockOperator& b) {
  require_same_dim(a, b, "commutator");
  return FockOperator(Matrix(a.matrix() * b.matrix() - b.matrix() * a.matrix()));
}

UnitaryOperator expm_i_hermitian(const FockOperator& hermitian, double s) {
  const Matrix& h = hermitian.matrix();
  const Matrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error("expm: Hermitian eigendecomposition failed");
  }
  const Eigen::VectorXcd phases =
      (Complex(0.0, s) * solver.eigenvalues().cast<Complex>()).array().exp();
  const Matrix& v = solver.eigenvectors();
  return UnitaryOperator(Matrix(v * phases.asDiagonal() * v.adjoint()));
}

UnitaryOperator expm_generator(const FockOperator& generator) {
  if (!generator.is_skew_hermitian(1e-10)) {
    throw DomainError("expm_generator: generator is not skew-Hermitian");
  }
  // G = −iH with H = iG Hermitian, so e^G = e^{−iH}.
  const FockOperator h = Complex(0.0, 1.0) * generator;
  return expm_i_hermitian(h, -1.0);
}

double norm(const FockOperator& op, Norm mode) {
  if (mode == Norm::frobenius) {
    return op.matrix().norm();
  }
  Eigen::BDCSVD<Matrix> svd(op.matrix());
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

double op_distance(const FockOperator& a, const FockOperator& b, Norm mode) {
  require_same_dim(a, b, "op_distance");
  return norm(a - b, mode);
}

// ---------------------------------------------------------------------------
// Binary dump

namespace {

constexpr std::array<char, 8> kMagic = {'G', 'U', 'P', 'S', 'I', 'M', 'O', 'P'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int k = 0; k < 8; ++k) {
    bytes[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
  }
  out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) {
    throw Error("read_operator: truncated stream");
  }
  std::uint64_t v = 0;
  for (int k = 7; k >= 0; --k) {
    v = (v << 8) | bytes[k];
  }
  return v;
}

}  // namespace

void write_operator(std::ostream& out, const FockOperator& op) {
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, static_cast<std::uint64_t>(op.dim()));
  for (Index r = 0; r < op.dim(); ++r) {
    for (Index c = 0; c < op.dim(); ++c) {
      const Complex z = op.matrix()(r, c);
      put_u64(out, std::bit_cast<std::uint64_t>(z.real()));
      put_u64(out, std::bit_cast<std::uint64_t>(z.imag()));
    }
  }
}

FockOperator read_operator(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) {
    throw Error("read_operator: bad magic");
  }
  const std::uint64_t dim = get_u64(in);
  if (dim == 0 || dim > (1u << 16)) {
    throw Error("read_operator: implausible dimension " + std::to_string(dim));
  }
  const auto d = static_cast<Index>(dim);
  Matrix m(d, d);
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c < d; ++c) {
      const double re = std::bit_cast<double>(get_u64(in));
      const double im = std::bit_cast<double>(get_u64(in));
      m(r, c) = Complex(re, im);
    }
  }
  return FockOperator(std::move(m));
}

ConvergedValue converge_in_dim(const std::function<double(Index)>& target, Index start_dim,
                               double rel_tol, Index cap) {
  if (start_dim < 2) {
    throw DomainError("converge_in_dim: start dimension must be at least 2");
  }
  ConvergedValue result;
  Index dim = start_dim;
  double value = target(dim);
  result.history.emplace_back(dim, value);
  while (true) {
    const Index next = 2 * dim;
    if (next > cap) {
      throw ConvergenceError("truncation did not converge below dimension cap " +
                             std::to_string(cap) + " (last D=" + std::to_string(dim) +
                             ", value=" + std::to_string(value) + ")");
    }
    const double next_value = target(next);
    result.history.emplace_back(next, next_value);
    const double scale = std::max(std::abs(next_value), std::abs(value));
    if (std::abs(next_value - value) <= rel_tol * scale) {
      result.dim = dim;
      result.value = value;
      return result;
    }
    dim = next;
    value = next_value;
  }
}

}  // namespace gupsim::fock
