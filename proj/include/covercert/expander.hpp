#ifndef COVERCERT_EXPANDER_HPP
#define COVERCERT_EXPANDER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "covercert/errors.hpp"
#include "covercert/hermitian.hpp"
#include "covercert/rng.hpp"

namespace covercert {

// Undirected d-regular multigraph held as neighbor slots: every vertex owns
// exactly d slots, multi-edges repeat, a self-loop occupies two slots on its
// vertex.  Walks draw slots uniformly, so multiplicities weight transitions.
class RegularGraph {
 public:
  RegularGraph(std::size_t n, std::size_t degree,
               std::vector<std::vector<std::size_t>> adjacency)
      : n_(n), d_(degree), adj_(std::move(adjacency)) {
    validate();
  }

  std::size_t size() const { return n_; }
  std::size_t degree() const { return d_; }
  const std::vector<std::size_t>& neighbors(std::size_t v) const { return adj_[v]; }

 private:
  void validate() const {
    if (n_ < 3) throw GraphShapeError("graph needs at least three vertices");
    if (d_ == 0) throw GraphShapeError("degree must be positive");
    if (adj_.size() != n_) throw GraphShapeError("adjacency must list every vertex");
    for (const auto& row : adj_) {
      if (row.size() != d_) throw GraphShapeError("every vertex needs exactly d neighbor slots");
      for (std::size_t w : row)
        if (w >= n_) throw GraphShapeError("neighbor index out of range");
    }
    for (std::size_t v = 0; v < n_; ++v) {
      std::map<std::size_t, std::size_t> seen;
      for (std::size_t w : adj_[v]) ++seen[w];
      for (const auto& [w, count] : seen) {
        if (w == v) {
          if (count % 2 != 0) throw GraphShapeError("self-loop must occupy two slots");
          continue;
        }
        const auto& back = adj_[w];
        if (static_cast<std::size_t>(std::count(back.begin(), back.end(), v)) != count)
          throw GraphShapeError("edge multiset must be symmetric");
      }
    }
  }

  std::size_t n_;
  std::size_t d_;
  std::vector<std::vector<std::size_t>> adj_;
};

inline RegularGraph build_cycle(std::size_t n) {
  if (n < 3) throw GraphShapeError("cycle needs at least three vertices");
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t v = 0; v < n; ++v) adj[v] = {(v + 1) % n, (v + n - 1) % n};
  return RegularGraph(n, 2, std::move(adj));
}

inline RegularGraph build_complete(std::size_t n) {
  if (n < 3) throw GraphShapeError("complete graph needs at least three vertices");
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w = 0; w < n; ++w)
      if (w != v) adj[v].push_back(w);
  return RegularGraph(n, n - 1, std::move(adj));
}

namespace detail {

inline std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
  return perm;
}

}  // namespace detail

// Permutation model: d/2 uniform permutations each contribute the 2-regular
// union of their cycles; an odd degree adds one uniform perfect matching.
inline RegularGraph build_random_regular(std::size_t n, std::size_t d, Rng& rng) {
  if (n < 3) throw GraphShapeError("graph needs at least three vertices");
  if (d == 0) throw GraphShapeError("degree must be positive");
  if ((n * d) % 2 != 0) throw ParityError("n times d must be even");
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t v = 0; v < n; ++v) adj[v].reserve(d);
  for (std::size_t r = 0; r + 1 < d; r += 2) {
    const std::vector<std::size_t> perm = detail::random_permutation(n, rng);
    for (std::size_t v = 0; v < n; ++v) {
      adj[v].push_back(perm[v]);
      adj[perm[v]].push_back(v);
    }
  }
  if (d % 2 == 1) {
    const std::vector<std::size_t> order = detail::random_permutation(n, rng);
    for (std::size_t i = 0; i + 1 < n; i += 2) {
      adj[order[i]].push_back(order[i + 1]);
      adj[order[i + 1]].push_back(order[i]);
    }
  }
  return RegularGraph(n, d, std::move(adj));
}

enum class SpectralMethod { exact_dense, analytic };

struct SpectralProfile {
  double lambda = 0.0;
  SpectralMethod method = SpectralMethod::exact_dense;

  SpectralProfile(double l, SpectralMethod m) : lambda(l), method(m) {
    if (!(l >= 0.0) || l > 1.0 + 1e-10) throw LambdaOutOfRange("lambda must lie in [0, 1]");
  }

  bool expander() const { return lambda < 1.0 - 1e-10; }
};

// Row-major walk transition matrix: P(v, w) = slot multiplicity of w at v
// over d.  Symmetric for any valid graph.
inline std::vector<double> transition_matrix(const RegularGraph& g) {
  const std::size_t n = g.size();
  std::vector<double> p(n * n, 0.0);
  const double inv_d = 1.0 / static_cast<double>(g.degree());
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w : g.neighbors(v)) p[v * n + w] += inv_d;
  return p;
}

// Second-largest absolute eigenvalue of the walk matrix by dense symmetric
// eigendecomposition.
inline SpectralProfile second_eigenvalue(const RegularGraph& g) {
  std::vector<double> p = transition_matrix(g);
  std::vector<double> vals;
  jacobi_cyclic<double>(p, g.size(), vals, nullptr);
  for (double& v : vals) v = std::abs(v);
  std::sort(vals.begin(), vals.end(), std::greater<double>());
  const double lambda = std::clamp(vals[1], 0.0, 1.0);
  return SpectralProfile(lambda, SpectralMethod::exact_dense);
}

// Length-`steps` walk: uniform start, then uniform neighbor slots.
inline std::vector<std::size_t> stationary_walk(const RegularGraph& g, std::size_t steps,
                                                Rng& rng) {
  if (steps == 0) throw GraphShapeError("walk needs at least one step");
  std::vector<std::size_t> out;
  out.reserve(steps);
  std::size_t cur = uniform_index(rng, g.size());
  out.push_back(cur);
  for (std::size_t k = 1; k < steps; ++k) {
    cur = g.neighbors(cur)[uniform_index(rng, g.degree())];
    out.push_back(cur);
  }
  return out;
}

namespace detail {

// One exact walk step on a signed measure, O(n d).
inline void walk_step(const RegularGraph& g, const std::vector<double>& in,
                      std::vector<double>& out) {
  out.assign(g.size(), 0.0);
  const double inv_d = 1.0 / static_cast<double>(g.degree());
  for (std::size_t v = 0; v < g.size(); ++v) {
    const double share = in[v] * inv_d;
    if (share == 0.0) continue;
    for (std::size_t w : g.neighbors(v)) out[w] += share;
  }
}

}  // namespace detail

// Worst-case l2 distance from uniform after t exact steps over point-mass
// starts, one value per t in [0, tmax].  The deviation vector is propagated
// directly, so small values keep full relative precision.
inline std::vector<double> walk_deviation_profile(const RegularGraph& g, std::size_t tmax) {
  const std::size_t n = g.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<std::vector<double>> cols(n, std::vector<double>(n, -inv_n));
  for (std::size_t v = 0; v < n; ++v) cols[v][v] += 1.0;

  std::vector<double> profile;
  profile.reserve(tmax + 1);
  std::vector<double> next;
  for (std::size_t t = 0;; ++t) {
    double worst = 0.0;
    for (const auto& q : cols) {
      double s = 0.0;
      for (double x : q) s += x * x;
      worst = std::max(worst, s);
    }
    profile.push_back(std::sqrt(worst));
    if (t == tmax) break;
    for (auto& q : cols) {
      detail::walk_step(g, q, next);
      q.swap(next);
    }
  }
  return profile;
}

inline double walk_deviation(const RegularGraph& g, std::size_t t) {
  return walk_deviation_profile(g, t).back();
}

// Resamples random regular graphs until the spectral gap clears the bound;
// experiments that need a guaranteed gap call this instead of sampling blind.
inline RegularGraph build_random_regular_gapped(std::size_t n, std::size_t d, double lambda_max,
                                                Rng& rng, int max_tries = 50) {
  for (int t = 0; t < max_tries; ++t) {
    RegularGraph g = build_random_regular(n, d, rng);
    if (second_eigenvalue(g).lambda < lambda_max) return g;
  }
  throw LambdaOutOfRange("no sampled graph cleared the spectral bound");
}

}  // namespace covercert

#endif
