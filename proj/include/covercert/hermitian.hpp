#ifndef COVERCERT_HERMITIAN_HPP
#define COVERCERT_HERMITIAN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "covercert/errors.hpp"
#include "covercert/matrix.hpp"

namespace covercert {

inline double conj_scalar(double x) { return x; }
inline cd conj_scalar(cd x) { return std::conj(x); }
inline double real_part(double x) { return x; }
inline double real_part(cd x) { return x.real(); }

// Cyclic Jacobi eigensolver for a Hermitian (T = cd) or symmetric (T = double)
// matrix held row major in `a`.  Sweeps until the off-diagonal Frobenius mass
// drops below rel_eps times the Frobenius norm of the input, or max_sweeps.
// Fills `values` with the unsorted diagonal and, when `vec` is non-null,
// accumulates the eigenvector matrix (columns) into it.
template <class T>
inline void jacobi_cyclic(std::vector<T>& a, std::size_t n, std::vector<double>& values,
                          std::vector<T>* vec, double rel_eps = 1e-13, int max_sweeps = 100) {
  if (vec) {
    vec->assign(n * n, T(0));
    for (std::size_t i = 0; i < n; ++i) (*vec)[i * n + i] = T(1);
  }
  double frob = 0.0;
  for (const auto& x : a) frob += std::norm(x);
  frob = std::sqrt(frob);
  const double off_target = rel_eps * frob;
  const double skip_tol = off_target / static_cast<double>(std::max<std::size_t>(n, 1));

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * std::norm(a[p * n + q]);
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() > off_target) {
    if (++sweep > max_sweeps)
      throw Error("jacobi eigensolver did not converge within sweep budget");
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const T apq = a[p * n + q];
        const double ab = std::abs(apq);
        if (ab <= skip_tol || ab < 1e-300) continue;
        const double app = real_part(a[p * n + p]);
        const double aqq = real_part(a[q * n + q]);
        // Phase factor making the pivot real, then a standard real rotation.
        const T u = conj_scalar(apq) * (1.0 / ab);
        const double tau = (aqq - app) / (2.0 * ab);
        double t;
        if (std::abs(tau) > 1e150) {
          t = 1.0 / (2.0 * tau);
        } else {
          t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const T us = u * s;
        const T uc = u * c;
        // Columns p and q of A <- A J.
        for (std::size_t k = 0; k < n; ++k) {
          const T akp = a[k * n + p];
          const T akq = a[k * n + q];
          a[k * n + p] = c * akp - us * akq;
          a[k * n + q] = s * akp + uc * akq;
        }
        // Rows p and q of A <- J† A.
        const T cus = conj_scalar(us);
        const T cuc = conj_scalar(uc);
        for (std::size_t k = 0; k < n; ++k) {
          const T apk = a[p * n + k];
          const T aqk = a[q * n + k];
          a[p * n + k] = c * apk - cus * aqk;
          a[q * n + k] = s * apk + cuc * aqk;
        }
        a[p * n + q] = T(0);
        a[q * n + p] = T(0);
        if (vec) {
          for (std::size_t k = 0; k < n; ++k) {
            const T vkp = (*vec)[k * n + p];
            const T vkq = (*vec)[k * n + q];
            (*vec)[k * n + p] = c * vkp - us * vkq;
            (*vec)[k * n + q] = s * vkp + uc * vkq;
          }
        }
      }
    }
  }
  values.resize(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = real_part(a[i * n + i]);
}

// Eigenvalues (sorted descending) and orthonormal eigenvector columns.
struct Spectrum {
  std::vector<double> eigenvalues;
  CMatrix eigenvectors;

  std::size_t dim() const { return eigenvalues.size(); }
  double max_abs_eigenvalue() const {
    double m = 0.0;
    for (double v : eigenvalues) m = std::max(m, std::abs(v));
    return m;
  }
};

namespace detail {

inline Spectrum sort_descending(std::vector<double> values, CMatrix vectors) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] > values[j]; });
  Spectrum s;
  s.eigenvalues.resize(n);
  s.eigenvectors = CMatrix(n);
  for (std::size_t c = 0; c < n; ++c) {
    s.eigenvalues[c] = values[order[c]];
    for (std::size_t r = 0; r < n; ++r) s.eigenvectors(r, c) = vectors(r, order[c]);
  }
  return s;
}

inline CMatrix rebuild(const Spectrum& s) {
  const std::size_t n = s.dim();
  CMatrix out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = s.eigenvalues[k];
    if (lam == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const cd vik = s.eigenvectors(i, k) * lam;
      for (std::size_t j = 0; j < n; ++j)
        out(i, j) += vik * std::conj(s.eigenvectors(j, k));
    }
  }
  return out;
}

}  // namespace detail

// Hermitian operator with its spectrum computed once at construction.
// Ingest symmetrizes (M + M†)/2 and records how big the correction was.
class HermitianOperator {
 public:
  explicit HermitianOperator(const CMatrix& m) {
    if (m.dim() == 0) throw DimMismatch("hermitian operator needs dim >= 1");
    if (!m.all_finite()) throw NonFiniteEntry("non-finite matrix entry");
    correction_ = m.hermiticity_defect();
    mat_ = CMatrix(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i)
      for (std::size_t j = 0; j < m.dim(); ++j)
        mat_(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    std::vector<cd> work = mat_.data();
    std::vector<double> values;
    std::vector<cd> vecs;
    jacobi_cyclic<cd>(work, m.dim(), values, &vecs);
    CMatrix v(m.dim());
    v.data() = std::move(vecs);
    spectrum_ = detail::sort_descending(std::move(values), std::move(v));
  }

  // Rebuilds V diag(values) V† from a transformed eigensystem; used by the
  // pseudo-power and logarithm maps so they do not re-solve.
  static HermitianOperator from_eigensystem(std::vector<double> values, const CMatrix& vectors) {
    HermitianOperator out(Spectrum{}, CMatrix{});
    out.spectrum_ = detail::sort_descending(std::move(values), vectors);
    out.mat_ = detail::rebuild(out.spectrum_);
    out.correction_ = 0.0;
    return out;
  }

  std::size_t dim() const { return mat_.dim(); }
  const CMatrix& matrix() const { return mat_; }
  const Spectrum& spectrum() const { return spectrum_; }
  double hermiticity_correction() const { return correction_; }
  double trace() const { return real_trace(mat_); }

 private:
  HermitianOperator(Spectrum s, CMatrix m) : mat_(std::move(m)), spectrum_(std::move(s)) {}

  CMatrix mat_;
  Spectrum spectrum_;
  double correction_ = 0.0;
};

inline const Spectrum& eigendecompose(const HermitianOperator& op) { return op.spectrum(); }

// Relative rank cutoff shared by every pseudo-power and support test.
inline constexpr double kRankCutoff = 1e-10;

inline double rank_cutoff(const HermitianOperator& op) {
  return kRankCutoff * op.spectrum().max_abs_eigenvalue();
}

inline double schatten_norm(const HermitianOperator& op, double p) {
  if (std::isnan(p) || p < 1.0) throw InvalidP("schatten norm needs p >= 1");
  const auto& ev = op.spectrum().eigenvalues;
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : ev) m = std::max(m, std::abs(v));
    return m;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (double v : ev) s += std::abs(v);
    return s;
  }
  double s = 0.0;
  for (double v : ev) s += std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

inline bool is_integer_power(double alpha) {
  return std::abs(alpha - std::round(alpha)) < 1e-12;
}

// Moore-Penrose pseudo-power: eigenvalues within the relative cutoff of zero
// are treated as exact zeros; the rest are raised to alpha in the eigenbasis.
inline HermitianOperator pseudo_power(const HermitianOperator& op, double alpha) {
  const double cut = rank_cutoff(op);
  const bool integer_alpha = is_integer_power(alpha);
  std::vector<double> mapped(op.dim());
  const auto& ev = op.spectrum().eigenvalues;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const double lam = ev[i];
    if (std::abs(lam) <= cut) {
      mapped[i] = 0.0;
    } else if (lam < 0.0 && !integer_alpha) {
      throw NegativeEigenvalue("pseudo_power with non-integer exponent on a negative eigenvalue");
    } else {
      mapped[i] = integer_alpha ? std::pow(lam, std::round(alpha)) : std::pow(lam, alpha);
    }
  }
  return HermitianOperator::from_eigensystem(std::move(mapped), op.spectrum().eigenvectors);
}

// Base-2 logarithm on the support; the zero eigenspace stays zero.
inline HermitianOperator matrix_log2(const HermitianOperator& op) {
  const double cut = rank_cutoff(op);
  std::vector<double> mapped(op.dim());
  const auto& ev = op.spectrum().eigenvalues;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const double lam = ev[i];
    if (std::abs(lam) <= cut) {
      mapped[i] = 0.0;
    } else if (lam < 0.0) {
      throw NegativeEigenvalue("matrix_log2 of a negative eigenvalue");
    } else {
      mapped[i] = std::log2(lam);
    }
  }
  return HermitianOperator::from_eigensystem(std::move(mapped), op.spectrum().eigenvectors);
}

// 2^M in the eigenbasis (inverse of matrix_log2 away from the kernel).
inline HermitianOperator matrix_exp2(const HermitianOperator& op) {
  std::vector<double> mapped(op.dim());
  const auto& ev = op.spectrum().eigenvalues;
  for (std::size_t i = 0; i < ev.size(); ++i) mapped[i] = std::exp2(ev[i]);
  return HermitianOperator::from_eigensystem(std::move(mapped), op.spectrum().eigenvectors);
}

// Projector onto the span of eigenvectors with |eigenvalue| above the cutoff.
inline CMatrix support_projector(const HermitianOperator& op) {
  const double cut = rank_cutoff(op);
  const std::size_t n = op.dim();
  CMatrix p(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(op.spectrum().eigenvalues[k]) <= cut) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const cd vik = op.spectrum().eigenvectors(i, k);
      for (std::size_t j = 0; j < n; ++j)
        p(i, j) += vik * std::conj(op.spectrum().eigenvectors(j, k));
    }
  }
  return p;
}

// Frobenius mass of m outside the projector's range: ||m - P m P||_2.
inline double support_residual(const CMatrix& m, const CMatrix& projector) {
  CMatrix pm = projector * m * projector;
  pm -= m;
  return pm.frobenius_norm();
}

enum class Normalization { normalized, subnormalized };

// PSD operator with a normalization tag.  Eigenvalues may dip to -1e-12 from
// rounding; those are clamped to zero in the view used by entropic code.
// The subnormalized tag places no upper trace ceiling: sample-average
// covering states are PSD estimators whose trace fluctuates above 1.
class DensityOperator {
 public:
  DensityOperator(const CMatrix& m, Normalization tag)
      : DensityOperator(HermitianOperator(m), tag) {}

  DensityOperator(HermitianOperator op, Normalization tag)
      : op_(std::move(op)), norm_(tag) {
    clamped_ = op_.spectrum().eigenvalues;
    for (double& v : clamped_) {
      if (v < -1e-12)
        throw NegativeEigenvalue("density operator has a negative eigenvalue");
      if (v < 0.0) v = 0.0;
    }
    if (norm_ == Normalization::normalized && std::abs(op_.trace() - 1.0) > 1e-12)
      throw InvalidDistribution("density operator tagged normalized but trace is not 1");
  }

  const HermitianOperator& op() const { return op_; }
  const CMatrix& matrix() const { return op_.matrix(); }
  Normalization normalization() const { return norm_; }
  std::size_t dim() const { return op_.dim(); }
  double trace() const { return op_.trace(); }
  const std::vector<double>& clamped_eigenvalues() const { return clamped_; }

 private:
  HermitianOperator op_;
  Normalization norm_;
  std::vector<double> clamped_;
};

inline double trace_distance(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw DimMismatch("trace_distance dimension mismatch");
  HermitianOperator diff(a.matrix() - b.matrix());
  return schatten_norm(diff, 1.0);
}

inline double trace_distance(const DensityOperator& a, const DensityOperator& b) {
  return trace_distance(a.op(), b.op());
}

inline double trace_distance(const CMatrix& a, const CMatrix& b) {
  if (a.dim() != b.dim()) throw DimMismatch("trace_distance dimension mismatch");
  HermitianOperator diff(a - b);
  return schatten_norm(diff, 1.0);
}

// Norm pair (||m||_1, ||sigma^{-1/4} m sigma^{-1/4}||_2); the first component
// never exceeds the second when supp(m) lies inside supp(sigma).
inline std::pair<double, double> weighted_cs_bound(const HermitianOperator& m,
                                                   const DensityOperator& sigma) {
  if (m.dim() != sigma.dim()) throw DimMismatch("weighting dimension mismatch");
  CMatrix proj = support_projector(sigma.op());
  const double residual = support_residual(m.matrix(), proj);
  if (residual >= 1e-8)
    throw SupportViolation("weighting matrix support escapes the state support");
  HermitianOperator quarter = pseudo_power(sigma.op(), -0.25);
  CMatrix w = quarter.matrix() * m.matrix() * quarter.matrix();
  return {schatten_norm(m, 1.0), w.frobenius_norm()};
}

}  // namespace covercert

#endif
