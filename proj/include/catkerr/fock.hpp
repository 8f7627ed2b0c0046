#pragma once

// Truncated Fock-space operators and states.
//
// Everything here is templated on the real scalar type; the rest of the
// library uses the double-precision aliases at the bottom of the file.
// Multi-mode spaces are ordered mode-major: the first entry of `dims` is the
// slowest-varying index of the Kronecker product.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "catkerr/errors.hpp"

namespace catkerr {

using Dims = std::vector<int>;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

inline Eigen::Index total_dim(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), Eigen::Index{1},
                         std::multiplies<>());
}

enum class Parity { Even, Odd };

template <typename Real>
class BasicOperator {
 public:
  using Scalar = std::complex<Real>;
  using Matrix = CMatrix<Real>;

  BasicOperator(Matrix data, Dims dims) : data_(std::move(data)), dims_(std::move(dims)) {
    const auto n = total_dim(dims_);
    if (data_.rows() != n || data_.cols() != n) {
      throw DimensionMismatch("operator matrix is " + std::to_string(data_.rows()) + "x" +
                              std::to_string(data_.cols()) + " but mode dims give " +
                              std::to_string(n));
    }
  }

  /// Single-mode convenience constructor.
  explicit BasicOperator(Matrix data)
      : BasicOperator(data, Dims{static_cast<int>(data.rows())}) {}

  const Matrix& matrix() const noexcept { return data_; }
  const Dims& dims() const noexcept { return dims_; }
  Eigen::Index dim() const noexcept { return data_.rows(); }

  BasicOperator adjoint() const { return {data_.adjoint(), dims_}; }

  bool is_hermitian(Real tol) const {
    return (data_ - data_.adjoint()).cwiseAbs().maxCoeff() <= tol;
  }

  BasicOperator& operator+=(const BasicOperator& o) {
    check_same(o);
    data_ += o.data_;
    return *this;
  }
  BasicOperator& operator-=(const BasicOperator& o) {
    check_same(o);
    data_ -= o.data_;
    return *this;
  }
  BasicOperator& operator*=(Scalar s) {
    data_ *= s;
    return *this;
  }

  friend BasicOperator operator+(BasicOperator a, const BasicOperator& b) { return a += b; }
  friend BasicOperator operator-(BasicOperator a, const BasicOperator& b) { return a -= b; }
  friend BasicOperator operator*(BasicOperator a, Scalar s) { return a *= s; }
  friend BasicOperator operator*(Scalar s, BasicOperator a) { return a *= s; }
  friend BasicOperator operator*(BasicOperator a, Real s) { return a *= Scalar(s); }
  friend BasicOperator operator*(Real s, BasicOperator a) { return a *= Scalar(s); }
  friend BasicOperator operator*(const BasicOperator& a, const BasicOperator& b) {
    a.check_same(b);
    return {a.data_ * b.data_, a.dims_};
  }

 private:
  void check_same(const BasicOperator& o) const {
    if (o.dims_ != dims_) throw DimensionMismatch("operators act on different mode spaces");
  }

  Matrix data_;
  Dims dims_;
};

/// Normalised state vector.
template <typename Real>
class BasicPureState {
 public:
  using Vector = CVector<Real>;

  BasicPureState(Vector amplitudes, Dims dims)
      : amps_(std::move(amplitudes)), dims_(std::move(dims)) {
    if (amps_.size() != total_dim(dims_)) throw DimensionMismatch("state size does not match mode dims");
    const Real norm = amps_.norm();
    if (!(norm > Real(0)) || !std::isfinite(static_cast<double>(norm))) {
      throw InvalidState("state vector has zero or non-finite norm");
    }
    amps_ /= norm;
  }

  explicit BasicPureState(Vector amplitudes)
      : BasicPureState(amplitudes, Dims{static_cast<int>(amplitudes.size())}) {}

  const Vector& amplitudes() const noexcept { return amps_; }
  const Dims& dims() const noexcept { return dims_; }
  Eigen::Index dim() const noexcept { return amps_.size(); }

 private:
  Vector amps_;
  Dims dims_;
};

/// Density matrix. The checked constructor enforces Hermiticity (1e-10),
/// unit trace (1e-8) and positivity (min eigenvalue >= -1e-8).
template <typename Real>
class BasicDensityMatrix {
 public:
  using Matrix = CMatrix<Real>;
  struct Unchecked {};

  BasicDensityMatrix(Matrix data, Dims dims) : data_(std::move(data)), dims_(std::move(dims)) {
    check_shape();
    validate();
  }

  /// Skips the invariant checks; used on hot paths that maintain them by construction.
  BasicDensityMatrix(Matrix data, Dims dims, Unchecked)
      : data_(std::move(data)), dims_(std::move(dims)) {
    check_shape();
  }

  explicit BasicDensityMatrix(const BasicPureState<Real>& psi)
      : data_(psi.amplitudes() * psi.amplitudes().adjoint()), dims_(psi.dims()) {}

  const Matrix& matrix() const noexcept { return data_; }
  const Dims& dims() const noexcept { return dims_; }
  Eigen::Index dim() const noexcept { return data_.rows(); }

  void validate(Real herm_tol = Real(1e-10), Real trace_tol = Real(1e-8),
                Real pos_tol = Real(1e-8)) const {
    const Real herm = (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > herm_tol) throw InvalidState("density matrix is not Hermitian");
    const auto tr = data_.trace();
    if (std::abs(tr - std::complex<Real>(1)) > trace_tol) {
      throw InvalidState("density matrix trace deviates from 1");
    }
    const Matrix h = (data_ + data_.adjoint()) / Real(2);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -pos_tol) {
      throw InvalidState("density matrix has a negative eigenvalue");
    }
  }

 private:
  void check_shape() const {
    const auto n = total_dim(dims_);
    if (data_.rows() != n || data_.cols() != n) {
      throw DimensionMismatch("density matrix shape does not match mode dims");
    }
  }

  Matrix data_;
  Dims dims_;
};

// ---------------------------------------------------------------------------
// Elementary operators

template <typename Real = double>
BasicOperator<Real> identity(const Dims& dims) {
  const auto n = total_dim(dims);
  return {CMatrix<Real>::Identity(n, n), dims};
}

template <typename Real = double>
BasicOperator<Real> identity(int n) {
  return identity<Real>(Dims{n});
}

/// Lowering operator with <n-1|a|n> = sqrt(n).
template <typename Real = double>
BasicOperator<Real> annihilation(int n) {
  if (n < 2) throw InvalidTruncation("annihilation operator needs N >= 2, got " + std::to_string(n));
  CMatrix<Real> a = CMatrix<Real>::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<Real>(k));
  return BasicOperator<Real>(std::move(a));
}

template <typename Real = double>
BasicOperator<Real> creation(int n) {
  return annihilation<Real>(n).adjoint();
}

template <typename Real = double>
BasicOperator<Real> number(int n) {
  if (n < 1) throw InvalidTruncation("number operator needs N >= 1");
  CMatrix<Real> d = CMatrix<Real>::Zero(n, n);
  for (int k = 0; k < n; ++k) d(k, k) = static_cast<Real>(k);
  return BasicOperator<Real>(std::move(d));
}

/// Photon-number parity (-1)^n.
template <typename Real = double>
BasicOperator<Real> parity_operator(int n) {
  if (n < 1) throw InvalidTruncation("parity operator needs N >= 1");
  CMatrix<Real> p = CMatrix<Real>::Zero(n, n);
  for (int k = 0; k < n; ++k) p(k, k) = (k % 2 == 0) ? Real(1) : Real(-1);
  return BasicOperator<Real>(std::move(p));
}

template <typename Real>
BasicOperator<Real> dag(const BasicOperator<Real>& a) {
  return a.adjoint();
}

template <typename Real>
BasicOperator<Real> commutator(const BasicOperator<Real>& a, const BasicOperator<Real>& b) {
  return a * b - b * a;
}

template <typename Real>
BasicOperator<Real> power(const BasicOperator<Real>& a, int k) {
  auto out = identity<Real>(a.dims());
  for (int i = 0; i < k; ++i) out = out * a;
  return out;
}

/// Kronecker product; the left factor becomes the slower index.
template <typename Real>
CMatrix<Real> kron(const CMatrix<Real>& a, const CMatrix<Real>& b) {
  CMatrix<Real> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

template <typename Real>
BasicOperator<Real> tensor(const BasicOperator<Real>& a, const BasicOperator<Real>& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return {kron<Real>(a.matrix(), b.matrix()), std::move(dims)};
}

template <typename Real>
BasicPureState<Real> tensor(const BasicPureState<Real>& a, const BasicPureState<Real>& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return {kron<Real>(a.amplitudes(), b.amplitudes()), std::move(dims)};
}

/// Embeds a single-mode operator as mode `mode` of a multi-mode space.
template <typename Real>
BasicOperator<Real> embed(const BasicOperator<Real>& op, std::size_t mode, const Dims& dims) {
  if (mode >= dims.size() || op.dims() != Dims{dims[mode]}) {
    throw DimensionMismatch("cannot embed operator into requested mode");
  }
  BasicOperator<Real> out = mode == 0 ? op : identity<Real>(dims[0]);
  for (std::size_t m = 1; m < dims.size(); ++m) {
    out = tensor(out, m == mode ? op : identity<Real>(dims[m]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// States

template <typename Real = double>
BasicPureState<Real> fock_state(int n, int level) {
  if (n < 1 || level < 0 || level >= n) throw InvalidTruncation("Fock level outside truncation");
  CVector<Real> v = CVector<Real>::Zero(n);
  v(level) = Real(1);
  return BasicPureState<Real>(std::move(v));
}

namespace detail {

template <typename Real>
void require_coherent_fits(std::complex<Real> alpha, int n, const char* what) {
  if (n < 2) throw InvalidTruncation(std::string(what) + " needs N >= 2");
  const Real mean = std::norm(alpha);
  if (mean > Real(n) / Real(2)) {
    throw TruncationInadequate(std::string(what) + ": |alpha|^2 = " + std::to_string(double(mean)) +
                                   " exceeds N/2 for N = " + std::to_string(n),
                               static_cast<int>(std::ceil(2 * mean)));
  }
}

/// Poisson-weighted coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!), unnormalised.
template <typename Real>
CVector<Real> coherent_series(std::complex<Real> alpha, int n) {
  CVector<Real> c(n);
  c(0) = std::exp(-std::norm(alpha) / Real(2));
  for (int k = 1; k < n; ++k) c(k) = c(k - 1) * alpha / std::sqrt(static_cast<Real>(k));
  return c;
}

}  // namespace detail

/// Coherent state |alpha>, truncated at N levels and renormalised.
/// Requires |alpha|^2 <= N/2.
template <typename Real = double>
BasicPureState<Real> coherent_state(std::complex<Real> alpha, int n) {
  detail::require_coherent_fits(alpha, n, "coherent_state");
  return BasicPureState<Real>(detail::coherent_series(alpha, n));
}

/// Cat state N(|alpha> +/- |-alpha>). Built directly on the surviving parity
/// sector, so the odd cat tends to |1> (with the phase of alpha) as alpha -> 0.
template <typename Real = double>
BasicPureState<Real> cat_state(std::complex<Real> alpha, Parity parity, int n) {
  detail::require_coherent_fits(alpha, n, "cat_state");
  const int first = parity == Parity::Even ? 0 : 1;
  CVector<Real> c = CVector<Real>::Zero(n);
  // Scale-free recursion: the overall prefactor drops out on normalisation and
  // starting from 1 keeps tiny |alpha| away from underflow.
  std::complex<Real> term(1);
  for (int k = 1; k <= first; ++k) term *= alpha / std::sqrt(static_cast<Real>(k));
  if (std::abs(term) == Real(0)) term = std::polar(Real(1), std::arg(alpha));
  c(first) = term;
  for (int k = first + 2; k < n; k += 2) {
    c(k) = c(k - 2) * alpha * alpha / std::sqrt(static_cast<Real>(k) * static_cast<Real>(k - 1));
  }
  return BasicPureState<Real>(std::move(c));
}

/// Displacement D(beta) = exp(beta a^dag - beta^* a) on the truncated space.
/// Exponentiated through the Hermitian generator, so the result is exactly
/// unitary. Requires |beta|^2 <= N/4.
template <typename Real = double>
BasicOperator<Real> displacement(std::complex<Real> beta, int n) {
  if (n < 2) throw InvalidTruncation("displacement needs N >= 2");
  if (std::norm(beta) > Real(n) / Real(4)) {
    throw TruncationInadequate("displacement: |beta|^2 exceeds N/4",
                               static_cast<int>(std::ceil(4 * std::norm(beta))));
  }
  if (beta == std::complex<Real>(0)) return identity<Real>(n);
  const auto a = annihilation<Real>(n).matrix();
  const std::complex<Real> i(0, 1);
  const CMatrix<Real> gen = beta * a.adjoint() - std::conj(beta) * a;
  const CMatrix<Real> herm = i * gen;  // exp(gen) = exp(-i * herm)
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(herm);
  const CVector<Real> phases = (-i * es.eigenvalues().template cast<std::complex<Real>>()).array().exp();
  return BasicOperator<Real>(es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
}

// ---------------------------------------------------------------------------
// Small helpers shared by the higher modules

template <typename Real>
CVector<Real> apply(const BasicOperator<Real>& op, const BasicPureState<Real>& psi) {
  if (op.dims() != psi.dims()) throw DimensionMismatch("operator and state dims differ");
  return op.matrix() * psi.amplitudes();
}

template <typename Real>
std::complex<Real> inner(const BasicPureState<Real>& a, const BasicPureState<Real>& b) {
  if (a.dims() != b.dims()) throw DimensionMismatch("states live in different spaces");
  return a.amplitudes().dot(b.amplitudes());  // conjugates the left argument
}

template <typename Real>
std::complex<Real> expect(const BasicOperator<Real>& op, const BasicPureState<Real>& psi) {
  return psi.amplitudes().dot(apply(op, psi));
}

template <typename Real>
std::complex<Real> expect(const BasicOperator<Real>& op, const BasicDensityMatrix<Real>& rho) {
  if (op.dims() != rho.dims()) throw DimensionMismatch("operator and state dims differ");
  return (op.matrix() * rho.matrix()).trace();
}

using Operator = BasicOperator<double>;
using PureState = BasicPureState<double>;
using DensityMatrix = BasicDensityMatrix<double>;
using Matrix = CMatrix<double>;
using Vector = CVector<double>;
using cd = std::complex<double>;

}  // namespace catkerr
