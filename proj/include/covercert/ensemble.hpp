#ifndef COVERCERT_ENSEMBLE_HPP
#define COVERCERT_ENSEMBLE_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "covercert/errors.hpp"
#include "covercert/hermitian.hpp"
#include "covercert/rng.hpp"

namespace covercert {

// Nonnegative weight vector with total in (0, 1 + 1e-12]; subnormalized
// vectors arise from smoothing, so exact normalization is a flag, not a rule.
class Distribution {
 public:
  explicit Distribution(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw InvalidDistribution("empty distribution");
    double s = 0.0;
    for (double v : w_) {
      if (!(v >= 0.0)) throw InvalidDistribution("negative or non-finite weight");
      s += v;
    }
    if (!(s > 0.0) || s > 1.0 + 1e-12)
      throw InvalidDistribution("distribution total must lie in (0, 1]");
    sum_ = s;
  }

  static Distribution uniform(std::size_t n) {
    return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  static Distribution point_mass(std::size_t n, std::size_t at) {
    std::vector<double> w(n, 0.0);
    w.at(at) = 1.0;
    return Distribution(std::move(w));
  }

  std::size_t alphabet_size() const { return w_.size(); }
  const std::vector<double>& weights() const { return w_; }
  double operator[](std::size_t i) const { return w_[i]; }
  double sum() const { return sum_; }
  bool normalized() const { return std::abs(sum_ - 1.0) <= 1e-12; }

 private:
  std::vector<double> w_;
  double sum_ = 0.0;
};

// Tags a matrix with trace 1 as normalized, anything lighter as subnormalized.
inline DensityOperator as_density(const CMatrix& m) {
  HermitianOperator op(m);
  Normalization tag = std::abs(op.trace() - 1.0) <= 1e-12 ? Normalization::normalized
                                                          : Normalization::subnormalized;
  return DensityOperator(std::move(op), tag);
}

// Classical-quantum ensemble {p(x), rho_x} with a shared state dimension.
struct CqEnsemble {
  Distribution dist;
  std::vector<DensityOperator> states;

  CqEnsemble(Distribution d, std::vector<DensityOperator> s)
      : dist(std::move(d)), states(std::move(s)) {
    if (states.empty() || states.size() != dist.alphabet_size())
      throw DimMismatch("ensemble needs one state per symbol");
    for (const auto& st : states)
      if (st.dim() != states.front().dim())
        throw DimMismatch("ensemble states must share one dimension");
  }

  std::size_t size() const { return states.size(); }
  std::size_t dim() const { return states.front().dim(); }
};

// k classical alphabets, a dense joint distribution over their product,
// per-alphabet reference distributions, and a state for every joint symbol.
// States live in a dense table for small products and behind a caller
// function above the table ceiling.
class MultipartiteEnsemble {
 public:
  using StateFn = std::function<DensityOperator(const std::vector<std::size_t>&)>;
  static constexpr std::size_t kDenseCeiling = std::size_t{1} << 16;

  MultipartiteEnsemble(std::vector<std::size_t> alphabets, Distribution joint,
                       std::vector<Distribution> refs, std::vector<DensityOperator> table)
      : alphabets_(std::move(alphabets)),
        joint_(std::move(joint)),
        refs_(std::move(refs)),
        table_(std::move(table)) {
    validate_shape();
    if (table_.size() != product())
      throw DimMismatch("state table must cover the joint alphabet");
    dim_ = table_.front().dim();
    for (const auto& st : table_)
      if (st.dim() != dim_) throw DimMismatch("states must share one dimension");
  }

  MultipartiteEnsemble(std::vector<std::size_t> alphabets, Distribution joint,
                       std::vector<Distribution> refs, StateFn fn, std::size_t state_dim)
      : alphabets_(std::move(alphabets)),
        joint_(std::move(joint)),
        refs_(std::move(refs)),
        fn_(std::move(fn)),
        dim_(state_dim) {
    validate_shape();
    if (!fn_) throw DimMismatch("state function must be callable");
  }

  std::size_t parts() const { return alphabets_.size(); }
  const std::vector<std::size_t>& alphabets() const { return alphabets_; }
  const Distribution& joint() const { return joint_; }
  const Distribution& ref(std::size_t i) const { return refs_.at(i); }
  std::size_t dim() const { return dim_; }

  std::size_t product() const {
    std::size_t p = 1;
    for (std::size_t a : alphabets_) p *= a;
    return p;
  }

  // Mixed-radix flattening, last axis fastest.
  std::size_t flat_index(const std::vector<std::size_t>& tuple) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < alphabets_.size(); ++i) idx = idx * alphabets_[i] + tuple[i];
    return idx;
  }

  std::vector<std::size_t> tuple_of(std::size_t flat) const {
    std::vector<std::size_t> tuple(alphabets_.size());
    for (std::size_t i = alphabets_.size(); i-- > 0;) {
      tuple[i] = flat % alphabets_[i];
      flat /= alphabets_[i];
    }
    return tuple;
  }

  DensityOperator state(std::size_t flat) const {
    if (!table_.empty()) return table_[flat];
    return fn_(tuple_of(flat));
  }

  // acc += scale * rho_tuple without copying when the dense table is present.
  void add_state_scaled(CMatrix& acc, std::size_t flat, double scale) const {
    if (scale == 0.0) return;
    if (!table_.empty()) {
      acc.add_scaled(table_[flat].matrix(), scale);
    } else {
      acc.add_scaled(fn_(tuple_of(flat)).matrix(), scale);
    }
  }

  double state_trace(std::size_t flat) const {
    if (!table_.empty()) return table_[flat].trace();
    return fn_(tuple_of(flat)).trace();
  }

 private:
  void validate_shape() {
    if (alphabets_.empty()) throw DimMismatch("need at least one alphabet");
    for (std::size_t a : alphabets_)
      if (a == 0) throw DimMismatch("alphabet sizes must be positive");
    if (product() > kDenseCeiling)
      throw DimMismatch("joint alphabet exceeds the dense product ceiling");
    if (joint_.alphabet_size() != product())
      throw DimMismatch("joint distribution must cover the product alphabet");
    if (refs_.size() != alphabets_.size())
      throw DimMismatch("need one reference distribution per alphabet");
    for (std::size_t i = 0; i < refs_.size(); ++i)
      if (refs_[i].alphabet_size() != alphabets_[i])
        throw DimMismatch("reference distribution size mismatch");
    // Reference support must carry every symbol the joint marginal touches.
    for (std::size_t i = 0; i < alphabets_.size(); ++i) {
      std::vector<double> marg = marginal_weights(i);
      for (std::size_t x = 0; x < alphabets_[i]; ++x)
        if (marg[x] > 0.0 && refs_[i][x] == 0.0)
          throw SupportViolation("joint marginal escapes the reference support");
    }
  }

 public:
  std::vector<double> marginal_weights(std::size_t axis) const {
    std::vector<double> marg(alphabets_[axis], 0.0);
    for (std::size_t flat = 0; flat < joint_.alphabet_size(); ++flat) {
      if (joint_[flat] == 0.0) continue;
      marg[tuple_of(flat)[axis]] += joint_[flat];
    }
    return marg;
  }

 private:
  std::vector<std::size_t> alphabets_;
  Distribution joint_;
  std::vector<Distribution> refs_;
  std::vector<DensityOperator> table_;
  StateFn fn_;
  std::size_t dim_ = 0;
};

// Lifts a single-alphabet ensemble with its sampling reference.
inline MultipartiteEnsemble lift_unipartite(const CqEnsemble& e, Distribution ref) {
  return MultipartiteEnsemble({e.size()}, e.dist, {std::move(ref)}, e.states);
}

struct SampleTuples {
  std::vector<std::vector<std::size_t>> tuples;

  explicit SampleTuples(std::vector<std::vector<std::size_t>> t) : tuples(std::move(t)) {
    for (const auto& tup : tuples)
      if (tup.empty()) throw InvalidDistribution("sample tuples need at least one entry");
  }
};

// Tuple-indexed weights of the block-diagonal control state plus its trace.
struct ControlState {
  std::vector<std::size_t> tuples;   // flat joint indices with positive weight
  std::vector<double> weights;       // p(x-tuple)
  double total_trace = 0.0;
};

inline ControlState control_state(const MultipartiteEnsemble& e) {
  ControlState out;
  for (std::size_t flat = 0; flat < e.joint().alphabet_size(); ++flat) {
    const double w = e.joint()[flat];
    if (w == 0.0) continue;
    out.tuples.push_back(flat);
    out.weights.push_back(w);
    out.total_trace += w * e.state_trace(flat);
  }
  return out;
}

inline DensityOperator average_state(const MultipartiteEnsemble& e) {
  CMatrix acc(e.dim());
  for (std::size_t flat = 0; flat < e.joint().alphabet_size(); ++flat)
    e.add_state_scaled(acc, flat, e.joint()[flat]);
  return as_density(acc);
}

inline DensityOperator average_state(const CqEnsemble& e) {
  CMatrix acc(e.dim());
  for (std::size_t x = 0; x < e.size(); ++x)
    acc.add_scaled(e.states[x].matrix(), e.dist[x]);
  return as_density(acc);
}

inline SampleTuples sample_tuples_iid(const MultipartiteEnsemble& e,
                                      const std::vector<std::size_t>& sizes, Rng& rng) {
  if (sizes.size() != e.parts()) throw DimMismatch("need one sample size per alphabet");
  std::vector<std::vector<std::size_t>> tuples(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0) throw InvalidDistribution("sample sizes must be at least 1");
    DiscreteSampler sampler(e.ref(i).weights());
    tuples[i].resize(sizes[i]);
    for (auto& v : tuples[i]) v = sampler.sample(rng);
  }
  return SampleTuples(std::move(tuples));
}

// Sample-average covering state with the change-of-measure ratio
// p(x1(a1),...,xk(ak)) / prod_i q_i(x_i(a_i)).  The index sum only depends on
// the sample through per-alphabet symbol counts, so it is aggregated by
// multiplicity instead of walking all prod_i A_i index tuples.
inline DensityOperator covering_state(const MultipartiteEnsemble& e, const SampleTuples& s) {
  if (s.tuples.size() != e.parts()) throw DimMismatch("sample tuple arity mismatch");
  const std::size_t k = e.parts();
  double inv_count = 1.0;
  std::vector<std::vector<double>> counts(k);
  std::vector<std::vector<std::size_t>> present(k);
  for (std::size_t i = 0; i < k; ++i) {
    counts[i].assign(e.alphabets()[i], 0.0);
    for (std::size_t sym : s.tuples[i]) {
      if (sym >= e.alphabets()[i]) throw DimMismatch("sampled symbol out of range");
      if (e.ref(i)[sym] == 0.0)
        throw ZeroReferenceWeight("sampled symbol has zero reference weight");
      if (counts[i][sym] == 0.0) present[i].push_back(sym);
      counts[i][sym] += 1.0;
    }
    inv_count /= static_cast<double>(s.tuples[i].size());
  }

  CMatrix acc(e.dim());
  std::vector<std::size_t> tuple(k);
  // Walk the product of per-alphabet support sets.
  std::function<void(std::size_t, double, double)> walk =
      [&](std::size_t axis, double mult, double log_ref) {
        if (axis == k) {
          const double p = e.joint()[e.flat_index(tuple)];
          if (p == 0.0) return;
          const double ratio = std::exp(std::log(p) - log_ref);
          e.add_state_scaled(acc, e.flat_index(tuple), inv_count * mult * ratio);
          return;
        }
        for (std::size_t sym : present[axis]) {
          tuple[axis] = sym;
          walk(axis + 1, mult * counts[axis][sym], log_ref + std::log(e.ref(axis)[sym]));
        }
      };
  walk(0, 1.0, 0.0);
  HermitianOperator op(acc);
  return DensityOperator(std::move(op), Normalization::subnormalized);
}

// --- marginals -------------------------------------------------------------

// Subset masks use bit i for alphabet i; axis order inside a subset follows
// ascending axis index.
inline std::vector<std::size_t> mask_axes(std::size_t mask, std::size_t k) {
  std::vector<std::size_t> axes;
  for (std::size_t i = 0; i < k; ++i)
    if (mask & (std::size_t{1} << i)) axes.push_back(i);
  return axes;
}

// cq marginal on the subset's alphabets: weights p_S and normalized
// conditional average states.
inline CqEnsemble marginal_cq(const MultipartiteEnsemble& e, std::size_t mask) {
  const std::size_t k = e.parts();
  const auto axes = mask_axes(mask, k);
  if (axes.empty()) throw DimMismatch("marginal needs a nonempty subset");
  std::size_t sub_product = 1;
  for (std::size_t a : axes) sub_product *= e.alphabets()[a];

  std::vector<double> weights(sub_product, 0.0);
  std::vector<CMatrix> blocks(sub_product, CMatrix(e.dim()));
  for (std::size_t flat = 0; flat < e.joint().alphabet_size(); ++flat) {
    const double p = e.joint()[flat];
    if (p == 0.0) continue;
    const auto tuple = e.tuple_of(flat);
    std::size_t sub = 0;
    for (std::size_t a : axes) sub = sub * e.alphabets()[a] + tuple[a];
    weights[sub] += p;
    e.add_state_scaled(blocks[sub], flat, p);
  }

  std::vector<DensityOperator> states;
  states.reserve(sub_product);
  for (std::size_t i = 0; i < sub_product; ++i) {
    if (weights[i] > 0.0) {
      states.push_back(as_density(blocks[i] * cd(1.0 / weights[i], 0.0)));
    } else {
      CMatrix unit(e.dim());
      unit(0, 0) = 1.0;
      states.push_back(DensityOperator(unit, Normalization::normalized));
    }
  }
  return CqEnsemble(Distribution(std::move(weights)), std::move(states));
}

// Product of the subset's reference distributions, same axis order.
inline Distribution subset_reference(const MultipartiteEnsemble& e, std::size_t mask) {
  const auto axes = mask_axes(mask, e.parts());
  if (axes.empty()) throw DimMismatch("reference needs a nonempty subset");
  std::vector<double> w{1.0};
  for (std::size_t a : axes) {
    std::vector<double> next(w.size() * e.alphabets()[a]);
    for (std::size_t i = 0; i < w.size(); ++i)
      for (std::size_t x = 0; x < e.alphabets()[a]; ++x)
        next[i * e.alphabets()[a] + x] = w[i] * e.ref(a)[x];
    w = std::move(next);
  }
  return Distribution(std::move(w));
}

// --- built-in state families ----------------------------------------------

inline std::vector<DensityOperator> random_pure_states(std::size_t count, std::size_t dim,
                                                       Rng& rng) {
  std::vector<DensityOperator> states;
  states.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<cd> psi(dim);
    double norm2 = 0.0;
    for (auto& v : psi) {
      v = cd(standard_normal(rng), standard_normal(rng));
      norm2 += std::norm(v);
    }
    CMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) m(i, j) = psi[i] * std::conj(psi[j]) / norm2;
    states.emplace_back(m, Normalization::normalized);
  }
  return states;
}

inline std::vector<DensityOperator> orthogonal_pure_states(std::size_t dim) {
  std::vector<DensityOperator> states;
  states.reserve(dim);
  for (std::size_t x = 0; x < dim; ++x) {
    CMatrix m(dim);
    m(x, x) = 1.0;
    states.emplace_back(m, Normalization::normalized);
  }
  return states;
}

inline std::vector<DensityOperator> classical_diagonal_states(std::size_t count, std::size_t dim,
                                                              Rng& rng) {
  std::vector<DensityOperator> states;
  states.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    CMatrix m(dim);
    double total = 0.0;
    std::vector<double> w(dim);
    for (auto& v : w) {
      v = -std::log(1.0 - uniform_real(rng));
      total += v;
    }
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = w[i] / total;
    states.emplace_back(m, Normalization::normalized);
  }
  return states;
}

// (1 - noise) rho + noise I/d applied symbol by symbol.
inline std::vector<DensityOperator> depolarize(const std::vector<DensityOperator>& states,
                                               double noise) {
  if (!(noise >= 0.0 && noise <= 1.0)) throw InvalidEps("depolarizing noise must be in [0,1]");
  std::vector<DensityOperator> out;
  out.reserve(states.size());
  for (const auto& st : states) {
    CMatrix m = st.matrix() * cd(1.0 - noise, 0.0);
    const double fill = noise * st.trace() / static_cast<double>(st.dim());
    for (std::size_t i = 0; i < st.dim(); ++i) m(i, i) += fill;
    out.push_back(as_density(m));
  }
  return out;
}

// Dirichlet(1,...,1) draw: normalized standard exponentials.
inline Distribution random_distribution(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& v : w) {
    v = -std::log(1.0 - uniform_real(rng));
    total += v;
  }
  for (auto& v : w) v /= total;
  return Distribution(std::move(w));
}

}  // namespace covercert

#endif
