#ifndef COVERCERT_DIVERGENCE_HPP
#define COVERCERT_DIVERGENCE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "covercert/ensemble.hpp"
#include "covercert/errors.hpp"
#include "covercert/hermitian.hpp"

namespace covercert {

inline constexpr double kInfBits = std::numeric_limits<double>::infinity();

struct SmoothingBudget {
  double eps;
  explicit SmoothingBudget(double e) : eps(e) {
    if (!(e > 0.0) || !(e < 1.0)) throw InvalidEps("smoothing budget must lie in (0, 1)");
  }
};

enum class SmoothKind { renyi2, max };
enum class BoundKind { exact, upper, lower };

// Subnormalized cq certificate: per-symbol scale factors on the block masses.
// `removed` is the trace-norm distance spent, never above eps times the trace.
struct SmoothCertificate {
  std::vector<double> scale;
  std::vector<double> masses;
  double removed = 0.0;
};

struct DivergenceValue {
  double bits = 0.0;
  BoundKind bound = BoundKind::exact;
  std::optional<SmoothCertificate> certificate;
  bool finite() const { return std::isfinite(bits); }
};

namespace detail {

// Support projector, pseudo powers, and log of one reference state, computed
// once and shared across all blocks weighted by that state.
struct RefCache {
  HermitianOperator op;
  CMatrix proj;
  CMatrix inv_quarter;
  CMatrix inv_half;
  CMatrix log2m;

  explicit RefCache(const HermitianOperator& tau)
      : op(tau),
        proj(support_projector(op)),
        inv_quarter(pseudo_power(op, -0.25).matrix()),
        inv_half(pseudo_power(op, -0.5).matrix()),
        log2m(matrix_log2(op).matrix()) {}
};

inline bool escapes_support(const CMatrix& scaled_block, const RefCache& ref) {
  return support_residual(scaled_block, ref.proj) > 1e-8;
}

// mass^2 / ref_mass * tr[(tau^{-1/4} rho tau^{-1/4})^2] for one block.
inline double d2_contribution(double mass, const DensityOperator& state, double ref_mass,
                              const RefCache& ref) {
  if (mass == 0.0 || state.trace() <= 0.0) return 0.0;
  if (ref_mass == 0.0) return kInfBits;
  CMatrix scaled = state.matrix();
  scaled *= cd(mass, 0.0);
  if (escapes_support(scaled, ref)) return kInfBits;
  CMatrix g = ref.inv_quarter * state.matrix() * ref.inv_quarter;
  const double f = g.frobenius_norm();
  return mass * mass / ref_mass * f * f;
}

// log2(mass / ref_mass) + log2 ||tau^{-1/2} rho tau^{-1/2}||_inf for one block.
inline double dmax_bits(double mass, const DensityOperator& state, double ref_mass,
                        const RefCache& ref) {
  if (mass == 0.0 || state.trace() <= 0.0) return -kInfBits;
  if (ref_mass == 0.0) return kInfBits;
  CMatrix scaled = state.matrix();
  scaled *= cd(mass, 0.0);
  if (escapes_support(scaled, ref)) return kInfBits;
  CMatrix g = ref.inv_half * state.matrix() * ref.inv_half;
  const double top = HermitianOperator(g).spectrum().max_abs_eigenvalue();
  if (top <= 0.0) return -kInfBits;
  return std::log2(mass) - std::log2(ref_mass) + std::log2(top);
}

// tr[A (log2 A - log2 B)] for A = mass * rho, B = ref_mass * tau.
inline double shannon_contribution(double mass, const DensityOperator& state, double ref_mass,
                                   const RefCache& ref) {
  if (mass == 0.0 || state.trace() <= 0.0) return 0.0;
  if (ref_mass == 0.0) return kInfBits;
  CMatrix scaled = state.matrix();
  scaled *= cd(mass, 0.0);
  if (escapes_support(scaled, ref)) return kInfBits;
  const double cut = rank_cutoff(state.op());
  double ent = 0.0;
  for (double lam : state.clamped_eigenvalues())
    if (lam > cut) ent += lam * std::log2(lam);
  const double t = state.trace();
  const double self = mass * ent + mass * t * std::log2(mass);
  const double cross =
      mass * hermitian_inner(state.matrix(), ref.log2m) + std::log2(ref_mass) * mass * t;
  return self - cross;
}

inline double d2_blocks(const std::vector<double>& mass, const std::vector<DensityOperator>& states,
                        const std::vector<double>& ref_mass, const RefCache& ref) {
  double total = 0.0;
  for (std::size_t x = 0; x < mass.size(); ++x) {
    const double c = d2_contribution(mass[x], states[x], ref_mass[x], ref);
    if (std::isinf(c)) return kInfBits;
    total += c;
  }
  return total > 0.0 ? std::log2(total) : -kInfBits;
}

inline double dmax_blocks(const std::vector<double>& mass,
                          const std::vector<DensityOperator>& states,
                          const std::vector<double>& ref_mass, const RefCache& ref) {
  double top = -kInfBits;
  for (std::size_t x = 0; x < mass.size(); ++x) {
    const double d = dmax_bits(mass[x], states[x], ref_mass[x], ref);
    if (std::isinf(d) && d > 0.0) return kInfBits;
    top = std::max(top, d);
  }
  return top;
}

inline double shannon_blocks(const std::vector<double>& mass,
                             const std::vector<DensityOperator>& states,
                             const std::vector<double>& ref_mass, const RefCache& ref) {
  double total = 0.0;
  for (std::size_t x = 0; x < mass.size(); ++x) {
    const double c = shannon_contribution(mass[x], states[x], ref_mass[x], ref);
    if (std::isinf(c)) return kInfBits;
    total += c;
  }
  return total;
}

inline double evaluate_kind(SmoothKind kind, const std::vector<double>& mass,
                            const std::vector<DensityOperator>& states,
                            const std::vector<double>& ref_mass, const RefCache& ref) {
  return kind == SmoothKind::renyi2 ? d2_blocks(mass, states, ref_mass, ref)
                                    : dmax_blocks(mass, states, ref_mass, ref);
}

// Greedy mass removal: symbols ordered by their divergence contribution,
// trace mass removed from the top until the budget is spent, final touched
// symbol reduced partially.
inline SmoothCertificate greedy_certificate(SmoothKind kind, const std::vector<double>& mass,
                                            const std::vector<DensityOperator>& states,
                                            const std::vector<double>& ref_mass,
                                            const RefCache& ref, double eps) {
  const std::size_t n = mass.size();
  std::vector<double> key(n), block_trace(n);
  double total = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    block_trace[x] = mass[x] * states[x].trace();
    total += block_trace[x];
    key[x] = kind == SmoothKind::renyi2 ? d2_contribution(mass[x], states[x], ref_mass[x], ref)
                                        : dmax_bits(mass[x], states[x], ref_mass[x], ref);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return key[i] > key[j]; });

  SmoothCertificate cert;
  cert.scale.assign(n, 1.0);
  double budget = eps * total;
  for (std::size_t idx : order) {
    if (budget <= 0.0) break;
    if (block_trace[idx] <= 0.0) continue;
    const double take = std::min(block_trace[idx], budget);
    cert.scale[idx] = 1.0 - take / block_trace[idx];
    cert.removed += take;
    budget -= take;
  }
  cert.masses.resize(n);
  for (std::size_t x = 0; x < n; ++x) cert.masses[x] = cert.scale[x] * mass[x];
  return cert;
}

// Reported value is the better of the kind's own certificate and the
// max-sorted one; evaluating Renyi-2 on the max certificate keeps the
// smooth values ordered across kinds.
inline DivergenceValue smooth_blocks(SmoothKind kind, const std::vector<double>& mass,
                                     const std::vector<DensityOperator>& states,
                                     const std::vector<double>& ref_mass, const RefCache& ref,
                                     SmoothingBudget budget) {
  SmoothCertificate pick = greedy_certificate(kind, mass, states, ref_mass, ref, budget.eps);
  double best = evaluate_kind(kind, pick.masses, states, ref_mass, ref);
  if (kind == SmoothKind::renyi2) {
    SmoothCertificate alt =
        greedy_certificate(SmoothKind::max, mass, states, ref_mass, ref, budget.eps);
    const double v = evaluate_kind(kind, alt.masses, states, ref_mass, ref);
    if (v < best) {
      best = v;
      pick = std::move(alt);
    }
  }
  DivergenceValue out;
  out.bits = best;
  out.bound = BoundKind::upper;
  out.certificate = std::move(pick);
  return out;
}

}  // namespace detail

// --- full-matrix divergences ------------------------------------------------

inline DivergenceValue shannon_divergence(const DensityOperator& a, const DensityOperator& b) {
  if (a.dim() != b.dim()) throw DimMismatch("divergence dimension mismatch");
  DivergenceValue out;
  if (support_residual(a.matrix(), support_projector(b.op())) > 1e-8) {
    out.bits = kInfBits;
    return out;
  }
  const double cut = rank_cutoff(a.op());
  double self = 0.0;
  for (double lam : a.clamped_eigenvalues())
    if (lam > cut) self += lam * std::log2(lam);
  out.bits = self - hermitian_inner(a.matrix(), matrix_log2(b.op()).matrix());
  return out;
}

inline DivergenceValue renyi2_divergence(const DensityOperator& a, const DensityOperator& b) {
  if (a.dim() != b.dim()) throw DimMismatch("divergence dimension mismatch");
  DivergenceValue out;
  if (support_residual(a.matrix(), support_projector(b.op())) > 1e-8) {
    out.bits = kInfBits;
    return out;
  }
  const CMatrix q = pseudo_power(b.op(), -0.25).matrix();
  const CMatrix g = q * a.matrix() * q;
  const double f = g.frobenius_norm();
  out.bits = f > 0.0 ? 2.0 * std::log2(f) : -kInfBits;
  return out;
}

inline DivergenceValue max_divergence(const DensityOperator& a, const DensityOperator& b) {
  if (a.dim() != b.dim()) throw DimMismatch("divergence dimension mismatch");
  DivergenceValue out;
  if (support_residual(a.matrix(), support_projector(b.op())) > 1e-8) {
    out.bits = kInfBits;
    return out;
  }
  const CMatrix h = pseudo_power(b.op(), -0.5).matrix();
  const CMatrix g = h * a.matrix() * h;
  const double top = HermitianOperator(g).spectrum().max_abs_eigenvalue();
  out.bits = top > 0.0 ? std::log2(top) : -kInfBits;
  return out;
}

// --- cq block divergences ----------------------------------------------------

// D(sigma^{XM} || r(x)-weighted blocks of tau) computed block by block.
inline double cq_shannon_divergence(const CqEnsemble& e, const std::vector<double>& ref_weights,
                                    const DensityOperator& tau) {
  if (ref_weights.size() != e.size() || tau.dim() != e.dim())
    throw DimMismatch("reference shape mismatch");
  detail::RefCache ref(tau.op());
  return detail::shannon_blocks(e.dist.weights(), e.states, ref_weights, ref);
}

inline double cq_renyi2_divergence(const CqEnsemble& e, const std::vector<double>& ref_weights,
                                   const DensityOperator& tau) {
  if (ref_weights.size() != e.size() || tau.dim() != e.dim())
    throw DimMismatch("reference shape mismatch");
  detail::RefCache ref(tau.op());
  return detail::d2_blocks(e.dist.weights(), e.states, ref_weights, ref);
}

inline double cq_max_divergence(const CqEnsemble& e, const std::vector<double>& ref_weights,
                                const DensityOperator& tau) {
  if (ref_weights.size() != e.size() || tau.dim() != e.dim())
    throw DimMismatch("reference shape mismatch");
  detail::RefCache ref(tau.op());
  return detail::dmax_blocks(e.dist.weights(), e.states, ref_weights, ref);
}

inline DivergenceValue smooth_divergence(SmoothKind kind, const CqEnsemble& e,
                                         const std::vector<double>& ref_weights,
                                         const DensityOperator& tau, SmoothingBudget budget) {
  if (ref_weights.size() != e.size() || tau.dim() != e.dim())
    throw DimMismatch("reference shape mismatch");
  detail::RefCache ref(tau.op());
  return detail::smooth_blocks(kind, e.dist.weights(), e.states, ref_weights, ref, budget);
}

// Reference weights default to the ensemble's own classical marginal.
inline DivergenceValue smooth_divergence(SmoothKind kind, const CqEnsemble& e,
                                         const DensityOperator& tau, SmoothingBudget budget) {
  return smooth_divergence(kind, e, e.dist.weights(), tau, budget);
}

// --- mutual informations and conditional entropies ---------------------------

struct MutualInformationReport {
  double shannon = 0.0;
  double renyi2 = 0.0;
  double renyi_max = 0.0;
  DivergenceValue smooth_renyi2;
  DivergenceValue smooth_renyi_max;
};

inline MutualInformationReport mutual_informations(const CqEnsemble& e, SmoothingBudget budget) {
  const DensityOperator avg = average_state(e);
  detail::RefCache ref(avg.op());
  const auto& p = e.dist.weights();
  MutualInformationReport r;
  r.shannon = detail::shannon_blocks(p, e.states, p, ref);
  r.renyi2 = detail::d2_blocks(p, e.states, p, ref);
  r.renyi_max = detail::dmax_blocks(p, e.states, p, ref);
  r.smooth_renyi2 = detail::smooth_blocks(SmoothKind::renyi2, p, e.states, p, ref, budget);
  r.smooth_renyi_max = detail::smooth_blocks(SmoothKind::max, p, e.states, p, ref, budget);
  return r;
}

// Smooth rows report the lowest-entropy candidate among greedy trace-reduction
// certificates and the untouched state, each scored against its own reduced
// reference marginal; the defining optimum can only be lower still, so these
// are upper bounds carrying their certificate.
struct ConditionalEntropyReport {
  double shannon = 0.0;
  double renyi2 = 0.0;
  double min_entropy = 0.0;
  DivergenceValue smooth_renyi2;
  DivergenceValue smooth_min;
};

inline ConditionalEntropyReport conditional_entropies(const CqEnsemble& e,
                                                      SmoothingBudget budget) {
  const double logx = std::log2(static_cast<double>(e.size()));
  const DensityOperator avg = average_state(e);
  detail::RefCache ref(avg.op());
  const std::vector<double> u(e.size(), 1.0 / static_cast<double>(e.size()));
  const auto& p = e.dist.weights();

  ConditionalEntropyReport r;
  r.shannon = logx - detail::shannon_blocks(p, e.states, u, ref);
  r.renyi2 = logx - detail::d2_blocks(p, e.states, u, ref);
  r.min_entropy = logx - detail::dmax_blocks(p, e.states, u, ref);

  auto eval_joint = [&](SmoothKind kind, const SmoothCertificate& c) {
    CMatrix marg(e.dim());
    for (std::size_t x = 0; x < e.size(); ++x) marg.add_scaled(e.states[x].matrix(), c.masses[x]);
    detail::RefCache rc{HermitianOperator(marg)};
    return detail::evaluate_kind(kind, c.masses, e.states, u, rc);
  };
  std::vector<SmoothCertificate> candidates;
  candidates.push_back(detail::greedy_certificate(SmoothKind::renyi2, p, e.states, u, ref,
                                                  budget.eps));
  candidates.push_back(detail::greedy_certificate(SmoothKind::max, p, e.states, u, ref,
                                                  budget.eps));
  SmoothCertificate untouched;
  untouched.scale.assign(e.size(), 1.0);
  untouched.masses = p;
  untouched.removed = 0.0;
  candidates.push_back(std::move(untouched));

  auto smooth_row = [&](SmoothKind kind) {
    double best = 0.0;
    const SmoothCertificate* pick = nullptr;
    for (const auto& c : candidates) {
      const double v = eval_joint(kind, c);
      if (pick == nullptr || v > best) {
        best = v;
        pick = &c;
      }
    }
    DivergenceValue out;
    out.bits = logx - best;
    out.bound = BoundKind::upper;
    out.certificate = *pick;
    return out;
  };
  r.smooth_renyi2 = smooth_row(SmoothKind::renyi2);
  r.smooth_min = smooth_row(SmoothKind::max);
  return r;
}

// --- hypothesis testing ------------------------------------------------------

namespace detail {

struct RatioPair {
  double a = 0.0;
  double b = 0.0;
};

// Minimal sum of t_i b_i with sum of t_i a_i >= need and t in [0, 1]: items
// taken in decreasing a/b order, one fractional pick at the end.
inline double np_min_beta(std::vector<RatioPair> items, double need) {
  items.erase(std::remove_if(items.begin(), items.end(),
                             [](const RatioPair& p) { return p.a <= 0.0 && p.b <= 0.0; }),
              items.end());
  std::stable_sort(items.begin(), items.end(), [](const RatioPair& l, const RatioPair& r) {
    return l.a * r.b > r.a * l.b;
  });
  double got = 0.0, beta = 0.0;
  for (const auto& it : items) {
    if (got >= need) break;
    if (it.a <= 0.0) continue;
    const double t = std::min(1.0, (need - got) / it.a);
    got += t * it.a;
    beta += t * it.b;
  }
  if (got < need - 1e-9) throw InvalidEps("type-one success target is infeasible");
  return beta;
}

// Joint eigenvalue pairs of commuting Hermitian blocks: b's eigenspaces are
// grouped, a is rediagonalized inside each group.
inline void common_eigenpairs(const HermitianOperator& a, const HermitianOperator& b,
                              std::vector<RatioPair>& out) {
  const Spectrum& sb = b.spectrum();
  const std::size_t n = b.dim();
  const CMatrix m = sb.eigenvectors.adjoint() * (a.matrix() * sb.eigenvectors);
  const double tol = 1e-9 * std::max(1.0, sb.max_abs_eigenvalue());
  std::size_t start = 0;
  while (start < n) {
    std::size_t stop = start + 1;
    while (stop < n && std::abs(sb.eigenvalues[stop] - sb.eigenvalues[start]) <= tol) ++stop;
    const std::size_t g = stop - start;
    double bval = 0.0;
    for (std::size_t i = start; i < stop; ++i) bval += sb.eigenvalues[i];
    bval = std::max(0.0, bval / static_cast<double>(g));
    if (g == 1) {
      out.push_back({std::max(0.0, real_part(m(start, start))), bval});
    } else {
      std::vector<cd> sub(g * g);
      for (std::size_t r = 0; r < g; ++r)
        for (std::size_t c = 0; c < g; ++c) sub[r * g + c] = m(start + r, start + c);
      std::vector<double> vals;
      jacobi_cyclic<cd>(sub, g, vals, nullptr);
      for (double v : vals) out.push_back({std::max(0.0, v), bval});
    }
    start = stop;
  }
}

inline double quad_form(const CMatrix& m, const CMatrix& vecs, std::size_t k) {
  const std::size_t n = m.dim();
  double out = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cd acc(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) acc += m(i, j) * vecs(j, k);
    out += (std::conj(vecs(i, k)) * acc).real();
  }
  return out;
}

inline void validate_ht_blocks(const std::vector<CMatrix>& ablocks,
                               const std::vector<CMatrix>& bblocks, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) throw InvalidEps("hypothesis test needs eps in (0, 1)");
  if (ablocks.size() != bblocks.size() || ablocks.empty())
    throw DimMismatch("hypothesis test block count mismatch");
  for (std::size_t i = 0; i < ablocks.size(); ++i)
    if (ablocks[i].dim() != bblocks[i].dim()) throw DimMismatch("block dimension mismatch");
}

// Exact Neyman-Pearson value for pairwise commuting blocks.
inline DivergenceValue ht_exact_commuting(const std::vector<CMatrix>& ablocks,
                                          const std::vector<CMatrix>& bblocks, double eps) {
  validate_ht_blocks(ablocks, bblocks, eps);
  const double need = 1.0 - eps;
  std::vector<RatioPair> pairs;
  for (std::size_t i = 0; i < ablocks.size(); ++i)
    common_eigenpairs(HermitianOperator(ablocks[i]), HermitianOperator(bblocks[i]), pairs);
  const double beta = np_min_beta(std::move(pairs), need);
  DivergenceValue out;
  out.bits = beta > 0.0 ? -std::log2(beta) : kInfBits;
  out.bound = BoundKind::exact;
  return out;
}

// Threshold-projector scan {a >= 2^R b} over a fixed level grid plus the
// exact pencil transition points; two-point randomized mixtures interpolate
// the achievable region.  Always a valid lower bound.
inline DivergenceValue ht_scan(const std::vector<CMatrix>& ablocks,
                               const std::vector<CMatrix>& bblocks, double eps) {
  validate_ht_blocks(ablocks, bblocks, eps);
  const double need = 1.0 - eps;
  double ta = 0.0, tb = 0.0;
  std::size_t total_dim = 0;
  for (std::size_t i = 0; i < ablocks.size(); ++i) {
    ta += real_trace(ablocks[i]);
    tb += real_trace(bblocks[i]);
    total_dim += ablocks[i].dim();
  }
  if (ta < need - 1e-9) throw InvalidEps("state trace below the type-one target");

  const double r_lo = -2.0 * std::log2(static_cast<double>(total_dim)) - 20.0;
  double r_hi = r_lo + 1.0;
  std::vector<double> rs;
  for (std::size_t i = 0; i < ablocks.size(); ++i) {
    const CMatrix inv = pseudo_power(HermitianOperator(bblocks[i]), -0.5).matrix();
    const HermitianOperator pencil(inv * ablocks[i] * inv);
    for (double m : pencil.spectrum().eigenvalues) {
      if (m > 1e-300) {
        const double lr = std::log2(m);
        rs.push_back(lr - 1e-9);
        rs.push_back(lr + 1e-9);
        r_hi = std::max(r_hi, lr);
      }
    }
  }
  for (int gpt = 0; gpt < 400; ++gpt)
    rs.push_back(r_lo + (r_hi - r_lo) * static_cast<double>(gpt) / 399.0);

  std::vector<std::pair<double, double>> pts{{0.0, 0.0}, {ta, tb}};
  for (double r : rs) {
    const double thr = std::pow(2.0, r);
    double x = 0.0, y = 0.0;
    for (std::size_t i = 0; i < ablocks.size(); ++i) {
      CMatrix h = ablocks[i];
      h.add_scaled(bblocks[i], -thr);
      HermitianOperator hh(h);
      const auto& sp = hh.spectrum();
      for (std::size_t k = 0; k < sp.dim(); ++k) {
        if (sp.eigenvalues[k] < 0.0) continue;
        x += quad_form(ablocks[i], sp.eigenvectors, k);
        y += quad_form(bblocks[i], sp.eigenvectors, k);
      }
    }
    pts.push_back({x, y});
  }

  double best = kInfBits;
  for (const auto& p : pts)
    if (p.first >= need - 1e-12) best = std::min(best, p.second);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double di = pts[i].first - need, dj = pts[j].first - need;
      if (di * dj >= 0.0) continue;
      const double t = di / (di - dj);
      best = std::min(best, pts[i].second + t * (pts[j].second - pts[i].second));
    }
  DivergenceValue out;
  out.bits = best > 0.0 ? -std::log2(best) : kInfBits;
  out.bound = BoundKind::lower;
  return out;
}

inline bool ht_blocks_commute(const std::vector<CMatrix>& ablocks,
                              const std::vector<CMatrix>& bblocks) {
  for (std::size_t i = 0; i < ablocks.size(); ++i) {
    const CMatrix c = ablocks[i] * bblocks[i] - bblocks[i] * ablocks[i];
    const double scale = std::max(1.0, ablocks[i].frobenius_norm() * bblocks[i].frobenius_norm());
    if (c.frobenius_norm() > 1e-10 * scale) return false;
  }
  return true;
}

// Commuting blocks take the exact Neyman-Pearson route, everything else the
// projector scan.
inline DivergenceValue ht_blocks(const std::vector<CMatrix>& ablocks,
                                 const std::vector<CMatrix>& bblocks, double eps) {
  validate_ht_blocks(ablocks, bblocks, eps);
  double ta = 0.0;
  for (const auto& a : ablocks) ta += real_trace(a);
  if (ta < (1.0 - eps) - 1e-9) throw InvalidEps("state trace below the type-one target");
  if (ht_blocks_commute(ablocks, bblocks)) return ht_exact_commuting(ablocks, bblocks, eps);
  return ht_scan(ablocks, bblocks, eps);
}

}  // namespace detail

inline DivergenceValue hypothesis_testing_divergence(const DensityOperator& a,
                                                     const DensityOperator& b, double eps) {
  if (a.dim() != b.dim()) throw DimMismatch("divergence dimension mismatch");
  return detail::ht_blocks({a.matrix()}, {b.matrix()}, eps);
}

// --- conditional hypothesis-testing mutual information -----------------------

// Classical registers Q, X, Y with a quantum register C; the joint classical
// law must factor as p(q) p(x|q) p(y|q).
struct TripartiteCqState {
  std::size_t nq, nx, ny;
  std::vector<double> joint;            // p(q, x, y), y fastest
  std::vector<DensityOperator> states;  // state for (x, y) at x * ny + y

  TripartiteCqState(std::size_t q, std::size_t x, std::size_t y, std::vector<double> p,
                    std::vector<DensityOperator> st)
      : nq(q), nx(x), ny(y), joint(std::move(p)), states(std::move(st)) {
    if (nq == 0 || nx == 0 || ny == 0) throw DimMismatch("alphabet sizes must be positive");
    if (joint.size() != nq * nx * ny) throw DimMismatch("joint table size mismatch");
    if (states.size() != nx * ny) throw DimMismatch("need one state per (x, y)");
    double total = 0.0;
    for (double v : joint) {
      if (!(v >= 0.0)) throw InvalidDistribution("negative or non-finite joint weight");
      total += v;
    }
    if (!(total > 0.0) || total > 1.0 + 1e-12)
      throw InvalidDistribution("joint distribution total must lie in (0, 1]");
    for (const auto& s : states)
      if (s.dim() != states.front().dim()) throw DimMismatch("states must share one dimension");
  }

  double p(std::size_t q, std::size_t x, std::size_t y) const {
    return joint[(q * nx + x) * ny + y];
  }
  std::size_t dim() const { return states.front().dim(); }
};

// Which side of the cut keeps the quantum register's conditional average.
enum class ConditionalCut { xy_c, x_yc, y_xc };

inline DivergenceValue conditional_ht_mutual_information(
    const TripartiteCqState& s, double eps, ConditionalCut cut = ConditionalCut::xy_c) {
  std::vector<double> pq(s.nq, 0.0);
  std::vector<std::vector<double>> px(s.nq, std::vector<double>(s.nx, 0.0));
  std::vector<std::vector<double>> py(s.nq, std::vector<double>(s.ny, 0.0));
  for (std::size_t q = 0; q < s.nq; ++q)
    for (std::size_t x = 0; x < s.nx; ++x)
      for (std::size_t y = 0; y < s.ny; ++y) {
        const double w = s.p(q, x, y);
        pq[q] += w;
        px[q][x] += w;
        py[q][y] += w;
      }
  for (std::size_t q = 0; q < s.nq; ++q) {
    if (pq[q] <= 0.0) continue;
    for (double& v : px[q]) v /= pq[q];
    for (double& v : py[q]) v /= pq[q];
  }
  for (std::size_t q = 0; q < s.nq; ++q)
    for (std::size_t x = 0; x < s.nx; ++x)
      for (std::size_t y = 0; y < s.ny; ++y)
        if (std::abs(s.p(q, x, y) - pq[q] * px[q][x] * py[q][y]) > 1e-10)
          throw FactorizationViolation("joint law does not factor as p(q)p(x|q)p(y|q)");

  const std::size_t d = s.dim();
  std::vector<CMatrix> ablocks, bblocks;
  for (std::size_t q = 0; q < s.nq; ++q) {
    if (pq[q] <= 0.0) continue;
    CMatrix sigma_q(d);
    if (cut == ConditionalCut::xy_c) {
      for (std::size_t x = 0; x < s.nx; ++x)
        for (std::size_t y = 0; y < s.ny; ++y)
          sigma_q.add_scaled(s.states[x * s.ny + y].matrix(), px[q][x] * py[q][y]);
    }
    for (std::size_t x = 0; x < s.nx; ++x)
      for (std::size_t y = 0; y < s.ny; ++y) {
        const double w = s.p(q, x, y);
        if (w == 0.0) continue;
        CMatrix a = s.states[x * s.ny + y].matrix();
        a *= cd(w, 0.0);
        CMatrix bbar(d);
        if (cut == ConditionalCut::xy_c) {
          bbar = sigma_q;
        } else if (cut == ConditionalCut::x_yc) {
          for (std::size_t xp = 0; xp < s.nx; ++xp)
            bbar.add_scaled(s.states[xp * s.ny + y].matrix(), px[q][xp]);
        } else {
          for (std::size_t yp = 0; yp < s.ny; ++yp)
            bbar.add_scaled(s.states[x * s.ny + yp].matrix(), py[q][yp]);
        }
        bbar *= cd(w, 0.0);
        ablocks.push_back(std::move(a));
        bblocks.push_back(std::move(bbar));
      }
  }
  return detail::ht_blocks(ablocks, bblocks, eps);
}

// --- sample-size thresholds ---------------------------------------------------

// For every nonempty subset mask over the alphabets: the exponent that the
// matching log sample-size sum must exceed.
inline std::map<std::size_t, double> sample_size_requirements(const MultipartiteEnsemble& e,
                                                              double eps) {
  SmoothingBudget budget(eps);
  const DensityOperator avg = average_state(e);
  std::map<std::size_t, double> out;
  const std::size_t full = (std::size_t{1} << e.parts());
  for (std::size_t mask = 1; mask < full; ++mask) {
    CqEnsemble marg = marginal_cq(e, mask);
    Distribution q = subset_reference(e, mask);
    DivergenceValue d2 = smooth_divergence(SmoothKind::renyi2, marg, q.weights(), avg, budget);
    out[mask] = d2.bits + 2.0 * std::log2(1.0 / eps);
  }
  return out;
}

}  // namespace covercert

#endif
