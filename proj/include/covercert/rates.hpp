#ifndef COVERCERT_RATES_HPP
#define COVERCERT_RATES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "covercert/divergence.hpp"
#include "covercert/ensemble.hpp"
#include "covercert/errors.hpp"
#include "covercert/hermitian.hpp"

namespace covercert {

namespace detail {

// One register's channel outputs: fixed count, shared dimension, unit trace.
inline void check_outputs(const std::vector<DensityOperator>& states, std::size_t count) {
  if (states.size() != count) throw DimMismatch("output state count mismatch");
  for (const auto& s : states) {
    if (s.dim() != states.front().dim())
      throw DimMismatch("outputs on one register must share a dimension");
    if (std::abs(s.trace() - 1.0) > 1e-9)
      throw InvalidDistribution("channel output states must be normalized");
  }
}

// m copied onto diagonal block `at` of a (blocks * m.dim())-dimensional zero
// matrix.
inline CMatrix embed_block(std::size_t blocks, std::size_t at, const CMatrix& m) {
  const std::size_t d = m.dim();
  CMatrix out(blocks * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out(at * d + i, at * d + j) = m(i, j);
  return out;
}

// Flattened cq view of per-q blocks scored against the per-q average: each
// block moves into a q-indexed diagonal slot, so the q-dependent reference
// becomes one block-diagonal operator and the single-reference block
// machinery applies unchanged.
struct ConditionalView {
  std::vector<double> masses;
  std::vector<DensityOperator> states;
  DensityOperator reference;
};

inline ConditionalView lift_conditional(const std::vector<std::vector<double>>& weights,
                                        const std::vector<std::vector<DensityOperator>>& states) {
  const std::size_t nq = weights.size();
  if (nq == 0 || states.size() != nq) throw DimMismatch("need matching per-q weights and states");
  std::size_t d = 0;
  for (const auto& row : states)
    if (!row.empty()) {
      d = row.front().dim();
      break;
    }
  if (d == 0) throw DimMismatch("need at least one state");
  for (std::size_t q = 0; q < nq; ++q) {
    if (weights[q].size() != states[q].size()) throw DimMismatch("per-q shape mismatch");
    for (const auto& s : states[q])
      if (s.dim() != d) throw DimMismatch("states must share one dimension");
  }

  CMatrix ref(nq * d);
  std::vector<double> masses;
  std::vector<DensityOperator> lifted;
  for (std::size_t q = 0; q < nq; ++q) {
    double pq = 0.0;
    for (double v : weights[q]) {
      if (!(v >= 0.0)) throw InvalidDistribution("negative or non-finite weight");
      pq += v;
    }
    if (pq <= 0.0) continue;
    CMatrix avg(d);
    for (std::size_t s = 0; s < states[q].size(); ++s)
      avg.add_scaled(states[q][s].matrix(), weights[q][s] / pq);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) ref(q * d + i, q * d + j) = avg(i, j);
    for (std::size_t s = 0; s < states[q].size(); ++s) {
      if (weights[q][s] == 0.0) continue;
      masses.push_back(weights[q][s]);
      lifted.emplace_back(embed_block(nq, q, states[q][s].matrix()),
                          Normalization::subnormalized);
    }
  }
  if (masses.empty()) throw InvalidDistribution("all weights vanish");
  return ConditionalView{std::move(masses), std::move(lifted),
                         DensityOperator(ref, Normalization::subnormalized)};
}

}  // namespace detail

// Shannon information between the block label and the quantum register given
// the q index: sum over q of p(q) D(sigma_{q,s} || avg_q) with joint weights
// w[q][s].
inline double conditional_shannon_information(
    const std::vector<std::vector<double>>& weights,
    const std::vector<std::vector<DensityOperator>>& states) {
  detail::ConditionalView v = detail::lift_conditional(weights, states);
  std::vector<double> ref_weights = v.masses;
  CqEnsemble e(Distribution(std::move(v.masses)), std::move(v.states));
  return cq_shannon_divergence(e, ref_weights, v.reference);
}

// Smooth max information with the same per-q reference lift.  The certificate
// rescales block masses inside the trace budget, so the value is an upper
// bound on the defining optimum; at a single q this is the unconditional
// smooth max information.
inline DivergenceValue smooth_conditional_max_information(
    const std::vector<std::vector<double>>& weights,
    const std::vector<std::vector<DensityOperator>>& states, double eps) {
  detail::ConditionalView v = detail::lift_conditional(weights, states);
  std::vector<double> ref_weights = v.masses;
  CqEnsemble e(Distribution(std::move(v.masses)), std::move(v.states));
  return smooth_divergence(SmoothKind::max, e, ref_weights, v.reference, SmoothingBudget(eps));
}

// Additive rate penalty for guarding `count` eavesdroppers at once.
inline double eavesdropper_penalty_bits(std::size_t count, double eps) {
  if (count == 0) throw ConfigError("need at least one eavesdropper");
  if (!(eps > 0.0) || !(eps < 1.0)) throw InvalidEps("eps must lie in (0, 1)");
  return 4.0 * std::log2(static_cast<double>(count)) / (eps * eps);
}

// Point-to-point instance: message distribution, per-symbol receiver output,
// and per-symbol outputs for each eavesdropper.  Outputs are given directly
// per input symbol; the rate formulas consume nothing else about the channel.
struct WiretapInstance {
  Distribution input;
  std::vector<DensityOperator> receiver;
  std::vector<std::vector<DensityOperator>> eavesdroppers;
  double eps;

  WiretapInstance(Distribution p, std::vector<DensityOperator> recv,
                  std::vector<std::vector<DensityOperator>> eaves, double epsilon)
      : input(std::move(p)),
        receiver(std::move(recv)),
        eavesdroppers(std::move(eaves)),
        eps(epsilon) {
    if (!(eps > 0.0) || !(eps < 1.0)) throw InvalidEps("eps must lie in (0, 1)");
    if (!input.normalized()) throw InvalidDistribution("input distribution must be normalized");
    if (eavesdroppers.empty()) throw ConfigError("need at least one eavesdropper");
    detail::check_outputs(receiver, input.alphabet_size());
    for (const auto& row : eavesdroppers) detail::check_outputs(row, input.alphabet_size());
  }

  std::size_t t() const { return eavesdroppers.size(); }
};

struct WiretapRateReport {
  double rate = 0.0;           // receiver_bits - max eavesdropper_bits - penalty
  double receiver_bits = 0.0;  // hypothesis-testing information to the receiver
  std::vector<double> eavesdropper_bits;  // smooth max information per eavesdropper
  double penalty = 0.0;
  double error_guarantee = 0.0;    // decoding error of the certified code
  double privacy_guarantee = 0.0;  // trace-norm leakage per eavesdropper
};

// May be negative; callers decide whether a nonpositive value means "no
// positive rate certified".
inline WiretapRateReport wiretap_rate_bound(const WiretapInstance& w) {
  const std::size_t nx = w.input.alphabet_size();
  TripartiteCqState legit(1, nx, 1, w.input.weights(), w.receiver);

  WiretapRateReport r;
  r.receiver_bits = conditional_ht_mutual_information(legit, w.eps, ConditionalCut::xy_c).bits;
  const std::vector<std::vector<double>> wq{w.input.weights()};
  double worst = -kInfBits;
  for (const auto& eave : w.eavesdroppers) {
    const double bits = smooth_conditional_max_information(wq, {eave}, w.eps).bits;
    r.eavesdropper_bits.push_back(bits);
    worst = std::max(worst, bits);
  }
  r.penalty = eavesdropper_penalty_bits(w.t(), w.eps);
  r.rate = r.receiver_bits - worst - r.penalty;
  r.error_guarantee = 2.0 * w.eps;
  r.privacy_guarantee = 4.0 * w.eps;
  return r;
}

// Two-sender instance with a classical timesharing register.  The joint law
// over (q, x, y) must factor as p(q) p(x|q) p(y|q); outputs are per (x, y)
// pair, receiver first, then one row per eavesdropper.
struct QmacInstance {
  std::size_t nq, nx, ny;
  std::vector<double> joint;            // p(q, x, y), y fastest
  std::vector<DensityOperator> receiver;  // output for (x, y) at x * ny + y
  std::vector<std::vector<DensityOperator>> eavesdroppers;
  double eps;
  std::vector<double> pq;
  std::vector<std::vector<double>> x_given_q, y_given_q;

  QmacInstance(std::size_t q, std::size_t x, std::size_t y, std::vector<double> p,
               std::vector<DensityOperator> recv,
               std::vector<std::vector<DensityOperator>> eaves, double epsilon)
      : nq(q),
        nx(x),
        ny(y),
        joint(std::move(p)),
        receiver(std::move(recv)),
        eavesdroppers(std::move(eaves)),
        eps(epsilon) {
    if (nq == 0 || nx == 0 || ny == 0) throw DimMismatch("alphabet sizes must be positive");
    if (!(eps > 0.0) || !(eps < 1.0)) throw InvalidEps("eps must lie in (0, 1)");
    if (joint.size() != nq * nx * ny) throw DimMismatch("joint table size mismatch");
    double total = 0.0;
    for (double v : joint) {
      if (!(v >= 0.0)) throw InvalidDistribution("negative or non-finite joint weight");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw InvalidDistribution("joint law must be normalized");
    if (eavesdroppers.empty()) throw ConfigError("need at least one eavesdropper");
    detail::check_outputs(receiver, nx * ny);
    for (const auto& row : eavesdroppers) detail::check_outputs(row, nx * ny);

    pq.assign(nq, 0.0);
    x_given_q.assign(nq, std::vector<double>(nx, 0.0));
    y_given_q.assign(nq, std::vector<double>(ny, 0.0));
    for (std::size_t qi = 0; qi < nq; ++qi)
      for (std::size_t xi = 0; xi < nx; ++xi)
        for (std::size_t yi = 0; yi < ny; ++yi) {
          const double v = weight(qi, xi, yi);
          pq[qi] += v;
          x_given_q[qi][xi] += v;
          y_given_q[qi][yi] += v;
        }
    for (std::size_t qi = 0; qi < nq; ++qi) {
      if (pq[qi] <= 0.0) continue;
      for (double& v : x_given_q[qi]) v /= pq[qi];
      for (double& v : y_given_q[qi]) v /= pq[qi];
    }
    for (std::size_t qi = 0; qi < nq; ++qi)
      for (std::size_t xi = 0; xi < nx; ++xi)
        for (std::size_t yi = 0; yi < ny; ++yi)
          if (std::abs(weight(qi, xi, yi) - pq[qi] * x_given_q[qi][xi] * y_given_q[qi][yi]) >
              1e-10)
            throw FactorizationViolation("joint law does not factor as p(q)p(x|q)p(y|q)");
  }

  double weight(std::size_t qi, std::size_t xi, std::size_t yi) const {
    return joint[(qi * nx + xi) * ny + yi];
  }
  std::size_t t() const { return eavesdroppers.size(); }
};

namespace detail {

// Joint weights over (q, s) for s = x, s = y, and s = (x, y).
struct QmacWeights {
  std::vector<std::vector<double>> x, y, xy;
};

inline QmacWeights qmac_weights(const QmacInstance& m) {
  QmacWeights w;
  w.x.assign(m.nq, std::vector<double>(m.nx, 0.0));
  w.y.assign(m.nq, std::vector<double>(m.ny, 0.0));
  w.xy.assign(m.nq, std::vector<double>(m.nx * m.ny, 0.0));
  for (std::size_t q = 0; q < m.nq; ++q)
    for (std::size_t x = 0; x < m.nx; ++x)
      for (std::size_t y = 0; y < m.ny; ++y) {
        const double v = m.weight(q, x, y);
        w.x[q][x] += v;
        w.y[q][y] += v;
        w.xy[q][x * m.ny + y] = v;
      }
  return w;
}

// Per-q states seen on one register when the other sender's symbol is
// averaged out; keep_x selects which symbol stays explicit.
inline std::vector<std::vector<DensityOperator>> qmac_marginal_states(
    const QmacInstance& m, const std::vector<DensityOperator>& outputs, bool keep_x) {
  const std::size_t d = outputs.front().dim();
  const std::size_t kept = keep_x ? m.nx : m.ny;
  std::vector<std::vector<DensityOperator>> rows(m.nq);
  for (std::size_t q = 0; q < m.nq; ++q) {
    rows[q].reserve(kept);
    for (std::size_t s = 0; s < kept; ++s) {
      CMatrix acc(d);
      if (keep_x) {
        for (std::size_t y = 0; y < m.ny; ++y)
          acc.add_scaled(outputs[s * m.ny + y].matrix(), m.y_given_q[q][y]);
      } else {
        for (std::size_t x = 0; x < m.nx; ++x)
          acc.add_scaled(outputs[x * m.ny + s].matrix(), m.x_given_q[q][x]);
      }
      rows[q].emplace_back(acc, Normalization::subnormalized);
    }
  }
  return rows;
}

// Per-q states over the full (x, y) label.
inline std::vector<std::vector<DensityOperator>> qmac_joint_states(
    const QmacInstance& m, const std::vector<DensityOperator>& outputs) {
  std::vector<std::vector<DensityOperator>> rows(m.nq);
  for (std::size_t q = 0; q < m.nq; ++q) rows[q] = outputs;
  return rows;
}

}  // namespace detail

// Rate caps for the two senders plus their sum, with the guarantees the caps
// certify.  Membership treats the region as closed, so boundary pairs count
// and the origin stays inside whenever every cap is nonnegative.
struct QmacRegion {
  double r1_bound = 0.0, r2_bound = 0.0, sum_bound = 0.0;
  double receiver_r1 = 0.0, receiver_r2 = 0.0, receiver_sum = 0.0;
  std::vector<double> eavesdropper_r1, eavesdropper_r2, eavesdropper_sum;
  double penalty = 0.0;
  double error_guarantee = 0.0;    // joint decoding error
  double privacy_guarantee = 0.0;  // worst-eavesdropper trace-norm leakage

  bool contains(double r1, double r2) const {
    return r1 >= 0.0 && r2 >= 0.0 && r1 <= r1_bound && r2 <= r2_bound &&
           r1 + r2 <= sum_bound;
  }
};

inline QmacRegion qmac_rate_region(const QmacInstance& m) {
  TripartiteCqState legit(m.nq, m.nx, m.ny, m.joint, m.receiver);

  QmacRegion r;
  r.receiver_r1 = conditional_ht_mutual_information(legit, m.eps, ConditionalCut::x_yc).bits;
  r.receiver_r2 = conditional_ht_mutual_information(legit, m.eps, ConditionalCut::y_xc).bits;
  r.receiver_sum = conditional_ht_mutual_information(legit, m.eps, ConditionalCut::xy_c).bits;

  const detail::QmacWeights w = detail::qmac_weights(m);
  double worst1 = -kInfBits, worst2 = -kInfBits, worst_sum = -kInfBits;
  for (const auto& eave : m.eavesdroppers) {
    const double e1 =
        smooth_conditional_max_information(w.x, detail::qmac_marginal_states(m, eave, true),
                                           m.eps)
            .bits;
    const double e2 =
        smooth_conditional_max_information(w.y, detail::qmac_marginal_states(m, eave, false),
                                           m.eps)
            .bits;
    const double es =
        smooth_conditional_max_information(w.xy, detail::qmac_joint_states(m, eave), m.eps).bits;
    r.eavesdropper_r1.push_back(e1);
    r.eavesdropper_r2.push_back(e2);
    r.eavesdropper_sum.push_back(es);
    worst1 = std::max(worst1, e1);
    worst2 = std::max(worst2, e2);
    worst_sum = std::max(worst_sum, es);
  }

  r.penalty = eavesdropper_penalty_bits(m.t(), m.eps);
  r.r1_bound = r.receiver_r1 - worst1 - r.penalty;
  r.r2_bound = r.receiver_r2 - worst2 - r.penalty;
  r.sum_bound = r.receiver_sum - worst_sum - r.penalty;
  r.error_guarantee = 50.0 * std::sqrt(m.eps);
  r.privacy_guarantee = 16.0 * std::sqrt(m.eps);
  return r;
}

// Per-channel-use caps in the many-copy limit: Shannon quantities, no
// eavesdropper-count penalty.
struct QmacIidRegion {
  double r1_bound = 0.0, r2_bound = 0.0, sum_bound = 0.0;
};

inline QmacIidRegion qmac_iid_region(const QmacInstance& m) {
  const detail::QmacWeights w = detail::qmac_weights(m);
  const std::size_t d = m.receiver.front().dim();

  // Receiver side keeps the other sender's symbol classical: it rides along
  // as a diagonal block index of the quantum register.
  std::vector<std::vector<DensityOperator>> rx(m.nq), ry(m.nq);
  for (std::size_t q = 0; q < m.nq; ++q) {
    rx[q].reserve(m.nx);
    for (std::size_t x = 0; x < m.nx; ++x) {
      CMatrix acc(m.ny * d);
      for (std::size_t y = 0; y < m.ny; ++y) {
        CMatrix block = m.receiver[x * m.ny + y].matrix();
        block *= cd(m.y_given_q[q][y], 0.0);
        acc += detail::embed_block(m.ny, y, block);
      }
      rx[q].emplace_back(acc, Normalization::subnormalized);
    }
    ry[q].reserve(m.ny);
    for (std::size_t y = 0; y < m.ny; ++y) {
      CMatrix acc(m.nx * d);
      for (std::size_t x = 0; x < m.nx; ++x) {
        CMatrix block = m.receiver[x * m.ny + y].matrix();
        block *= cd(m.x_given_q[q][x], 0.0);
        acc += detail::embed_block(m.nx, x, block);
      }
      ry[q].emplace_back(acc, Normalization::subnormalized);
    }
  }

  const double recv1 = conditional_shannon_information(w.x, rx);
  const double recv2 = conditional_shannon_information(w.y, ry);
  const double recv_sum =
      conditional_shannon_information(w.xy, detail::qmac_joint_states(m, m.receiver));

  double worst1 = -kInfBits, worst2 = -kInfBits, worst_sum = -kInfBits;
  for (const auto& eave : m.eavesdroppers) {
    worst1 = std::max(
        worst1, conditional_shannon_information(w.x, detail::qmac_marginal_states(m, eave, true)));
    worst2 = std::max(worst2, conditional_shannon_information(
                                  w.y, detail::qmac_marginal_states(m, eave, false)));
    worst_sum = std::max(
        worst_sum, conditional_shannon_information(w.xy, detail::qmac_joint_states(m, eave)));
  }

  QmacIidRegion out;
  out.r1_bound = recv1 - worst1;
  out.r2_bound = recv2 - worst2;
  out.sum_bound = recv_sum - worst_sum;
  return out;
}

}  // namespace covercert

#endif
