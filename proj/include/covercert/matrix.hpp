#ifndef COVERCERT_MATRIX_HPP
#define COVERCERT_MATRIX_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "covercert/errors.hpp"

namespace covercert {

using cd = std::complex<double>;

// Dense square complex matrix, row major.  Plain storage plus the little
// arithmetic the spectral layer needs; no spectral state of its own.
class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(std::size_t n) : n_(n), a_(n * n, cd(0.0, 0.0)) {}

  static CMatrix identity(std::size_t n) {
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t dim() const { return n_; }
  cd& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const cd& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  const std::vector<cd>& data() const { return a_; }
  std::vector<cd>& data() { return a_; }

  CMatrix& operator+=(const CMatrix& o) {
    check_dim(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    check_dim(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  CMatrix& operator*=(cd s) {
    for (auto& v : a_) v *= s;
    return *this;
  }
  friend CMatrix operator+(CMatrix l, const CMatrix& r) { return l += r; }
  friend CMatrix operator-(CMatrix l, const CMatrix& r) { return l -= r; }
  friend CMatrix operator*(CMatrix l, cd s) { return l *= s; }
  friend CMatrix operator*(cd s, CMatrix r) { return r *= s; }

  // In-place fused accumulate: this += s * o.  Hot path of the covering-state
  // assembly, so avoid a temporary.
  void add_scaled(const CMatrix& o, double s) {
    check_dim(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += s * o.a_[k];
  }

  friend CMatrix operator*(const CMatrix& l, const CMatrix& r) {
    l.check_dim(r);
    std::size_t n = l.n_;
    CMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        cd lik = l(i, k);
        if (lik == cd(0.0, 0.0)) continue;
        for (std::size_t j = 0; j < n; ++j) out(i, j) += lik * r(k, j);
      }
    return out;
  }

  CMatrix adjoint() const {
    CMatrix out(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  cd trace() const {
    cd t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : a_) s += std::norm(v);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : a_) m = std::max(m, std::abs(v));
    return m;
  }

  bool all_finite() const {
    for (const auto& v : a_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

  // Largest entrywise magnitude of (M - M†)/2; zero iff exactly Hermitian.
  double hermiticity_defect() const {
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i; j < n_; ++j)
        m = std::max(m, 0.5 * std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return m;
  }

 private:
  void check_dim(const CMatrix& o) const {
    if (n_ != o.n_) throw DimMismatch("matrix dimension mismatch");
  }

  std::size_t n_ = 0;
  std::vector<cd> a_;
};

inline double real_trace(const CMatrix& m) { return m.trace().real(); }

// tr(A B) for two Hermitian matrices is real; computed entrywise without
// forming the product.
inline double hermitian_inner(const CMatrix& a, const CMatrix& b) {
  if (a.dim() != b.dim()) throw DimMismatch("inner product dimension mismatch");
  double s = 0.0;
  std::size_t n = a.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      s += (a(i, j) * b(j, i)).real();
  return s;
}

}  // namespace covercert

#endif
