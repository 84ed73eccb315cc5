#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <vector>

#include "chancoh/config.hpp"
#include "chancoh/errors.hpp"

namespace chancoh {

using Complex = std::complex<double>;

/// Dense complex matrix in row-major order. Values are immutable in spirit:
/// every operation returns a fresh matrix, nothing mutates shared state.
class ComplexMatrix {
 public:
  ComplexMatrix() : rows_(0), cols_(0) {}
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, Complex(0.0, 0.0)) {}

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(const std::vector<double>& d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  const std::vector<Complex>& data() const { return a_; }

  ComplexMatrix dagger() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
  }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const Complex& z : a_) s += std::norm(z);
    return std::sqrt(s);
  }

  double max_abs() const {
    double s = 0.0;
    for (const Complex& z : a_) s = std::max(s, std::abs(z));
    return s;
  }

  bool all_finite() const {
    for (const Complex& z : a_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
  }
  ComplexMatrix& operator*=(Complex s) {
    for (Complex& z : a_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) throw ValidationError("matrix product: inner dimensions differ");
    ComplexMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex(0.0, 0.0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

 private:
  void require_same_shape(const ComplexMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw ValidationError("matrix addition: shapes differ");
  }

  std::size_t rows_, cols_;
  std::vector<Complex> a_;
};

inline double distance_frobenius(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).frobenius_norm();
}

/// tr(a * b) without forming the product.
inline Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols())
    throw ValidationError("trace_of_product: incompatible shapes");
  Complex t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) t += a(i, k) * b(k, i);
  return t;
}

inline bool is_hermitian(const ComplexMatrix& h, double tol = default_tolerances().hermitian) {
  if (!h.square()) return false;
  return distance_frobenius(h, h.dagger()) <= tol * std::max(1.0, h.frobenius_norm());
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& h) {
  return 0.5 * (h + h.dagger());
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex(0.0, 0.0)) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          c(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return c;
}

enum class Subsystem { A, B };

/// Partial trace of a (dimA*dimB) x (dimA*dimB) matrix over one tensor factor.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dimA, std::size_t dimB,
                                   Subsystem which) {
  const std::size_t n = dimA * dimB;
  if (m.rows() != n || m.cols() != n)
    throw ValidationError("partial_trace: matrix size does not match dimA*dimB");
  if (which == Subsystem::B) {
    ComplexMatrix out(dimA, dimA);
    for (std::size_t j = 0; j < dimA; ++j)
      for (std::size_t k = 0; k < dimA; ++k)
        for (std::size_t b = 0; b < dimB; ++b) out(j, k) += m(j * dimB + b, k * dimB + b);
    return out;
  }
  ComplexMatrix out(dimB, dimB);
  for (std::size_t b = 0; b < dimB; ++b)
    for (std::size_t c = 0; c < dimB; ++c)
      for (std::size_t j = 0; j < dimA; ++j) out(b, c) += m(j * dimB + b, j * dimB + c);
  return out;
}

struct HermitianEig {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // columns, orthonormal
};

/// Cyclic Jacobi eigendecomposition for complex Hermitian matrices.
/// Dimensions here never exceed ~64, where Jacobi is both simple and
/// accurate for small eigenvalues.
inline HermitianEig hermitian_eig(const ComplexMatrix& h_in,
                                  double herm_tol = default_tolerances().hermitian) {
  if (!h_in.square()) throw ValidationError("hermitian_eig: matrix not square");
  if (!is_hermitian(h_in, herm_tol))
    throw ValidationError("hermitian_eig: matrix not Hermitian within tolerance");
  ComplexMatrix h = hermitian_part(h_in);
  const std::size_t n = h.rows();
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = std::max(1.0, h.frobenius_norm());

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(h(p, q));
    if (std::sqrt(off) <= 1e-15 * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = h(p, q);
        const double r = std::abs(apq);
        if (r <= 1e-18 * scale) continue;
        const Complex phase = apq / r;  // apq = r * phase
        const double app = h(p, p).real();
        const double aqq = h(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Unitary on the (p,q) plane: col p -> c*ep - s*conj(phase)*eq,
        // col q -> s*phase*ep + c*eq. Annihilates h(p,q).
        const Complex gp = -s * std::conj(phase);
        const Complex gq = s * phase;
        for (std::size_t i = 0; i < n; ++i) {
          const Complex hip = h(i, p), hiq = h(i, q);
          h(i, p) = c * hip + gp * hiq;
          h(i, q) = gq * hip + c * hiq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const Complex hpj = h(p, j), hqj = h(q, j);
          h(p, j) = c * hpj + std::conj(gp) * hqj;
          h(q, j) = std::conj(gq) * hpj + c * hqj;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const Complex vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip + gp * viq;
          v(i, q) = gq * vip + c * viq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return h(a, a).real() < h(b, b).real(); });

  HermitianEig out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = h(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

/// Rebuild V f(diag) V† from a decomposition, applying f to each eigenvalue.
template <typename F>
inline ComplexMatrix rebuild_from_eig(const HermitianEig& e, F&& f) {
  const std::size_t n = e.eigenvalues.size();
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(e.eigenvalues[k]);
    if (fk == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex vik = e.eigenvectors(i, k);
      if (vik == Complex(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < n; ++j)
        out(i, j) += fk * vik * std::conj(e.eigenvectors(j, k));
    }
  }
  return out;
}

inline bool is_psd(const ComplexMatrix& h, double tol = default_tolerances().psd) {
  const HermitianEig e = hermitian_eig(h);
  if (e.eigenvalues.empty()) return true;
  const double lmax = std::max(std::abs(e.eigenvalues.front()), std::abs(e.eigenvalues.back()));
  return e.eigenvalues.front() >= -tol * std::max(1.0, lmax);
}

/// PSD square root via the spectral decomposition. Eigenvalues slightly
/// below zero (within psd_tol relative to the spectral radius) are clamped.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& h,
                              double psd_tol = default_tolerances().psd) {
  const HermitianEig e = hermitian_eig(h);
  const std::size_t n = e.eigenvalues.size();
  double lmax = 0.0;
  for (double l : e.eigenvalues) lmax = std::max(lmax, std::abs(l));
  for (double l : e.eigenvalues)
    if (l < -psd_tol * std::max(1.0, lmax))
      throw ValidationError("psd_sqrt: matrix has a significantly negative eigenvalue");
  (void)n;
  return rebuild_from_eig(e, [](double l) { return l > 0.0 ? std::sqrt(l) : 0.0; });
}

/// Pseudo-inverse square root on the support (eigenvalues > support_tol * lmax),
/// together with the support projector.
inline std::pair<ComplexMatrix, ComplexMatrix> pinv_sqrt(
    const ComplexMatrix& h, double support_tol = default_tolerances().support) {
  const HermitianEig e = hermitian_eig(h);
  double lmax = 0.0;
  for (double l : e.eigenvalues) lmax = std::max(lmax, l);
  const double cut = support_tol * std::max(lmax, 0.0);
  ComplexMatrix inv_sqrt =
      rebuild_from_eig(e, [&](double l) { return l > cut && l > 0.0 ? 1.0 / std::sqrt(l) : 0.0; });
  ComplexMatrix proj = rebuild_from_eig(e, [&](double l) { return l > cut && l > 0.0 ? 1.0 : 0.0; });
  return {std::move(inv_sqrt), std::move(proj)};
}

/// Trace norm ||m||_1 = sum of singular values, via eig of m† m.
inline double trace_norm(const ComplexMatrix& m) {
  const HermitianEig e = hermitian_eig(m.dagger() * m);
  double s = 0.0;
  for (double l : e.eigenvalues) s += std::sqrt(std::max(l, 0.0));
  return s;
}

namespace detail {

/// Cholesky factorization h = L L†. Returns false if h is not positive
/// definite (used as the line-search feasibility test in the SDP solvers).
inline bool cholesky(const ComplexMatrix& h, ComplexMatrix& l) {
  const std::size_t n = h.rows();
  l = ComplexMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      Complex s = h(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      if (i == j) {
        const double d = s.real();
        if (d <= 0.0 || !std::isfinite(d)) return false;
        l(i, i) = std::sqrt(d);
      } else {
        l(i, j) = s / l(j, j).real();
      }
    }
  }
  return true;
}

inline double log_det_from_cholesky(const ComplexMatrix& l) {
  double s = 0.0;
  for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i).real());
  return 2.0 * s;
}

/// Inverse of a Hermitian positive definite matrix from its Cholesky factor.
inline ComplexMatrix inverse_from_cholesky(const ComplexMatrix& l) {
  const std::size_t n = l.rows();
  // Solve L Y = I by forward substitution, then L† X = Y backward.
  ComplexMatrix y(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t i = 0; i < n; ++i) {
      Complex s = (i == col) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y(k, col);
      y(i, col) = s / l(i, i).real();
    }
  }
  ComplexMatrix x(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t ii = n; ii-- > 0;) {
      Complex s = y(ii, col);
      for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(l(k, ii)) * x(k, col);
      x(ii, col) = s / l(ii, ii).real();
    }
  }
  return x;
}

/// Dense real linear solve with partial pivoting (KKT systems are tiny).
inline std::vector<double> solve_real_linear(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  if (a.size() != n * n) throw ValidationError("solve_real_linear: shape mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (a[piv * n + col] == 0.0) throw SolverError("linear solve: singular system");
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
      std::swap(b[piv], b[col]);
    }
    const double d = a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / d;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t c = ii + 1; c < n; ++c) s -= a[ii * n + c] * x[c];
    x[ii] = s / a[ii * n + ii];
  }
  return x;
}

}  // namespace detail

}  // namespace chancoh
