#ifndef COVERCERT_IO_HPP
#define COVERCERT_IO_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "covercert/config.hpp"
#include "covercert/ensemble.hpp"
#include "covercert/errors.hpp"
#include "covercert/expander.hpp"
#include "covercert/rates.hpp"
#include "covercert/rng.hpp"

namespace covercert {

namespace detail {

[[noreturn]] inline void schema_fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

}  // namespace detail

inline const Json& json_field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) detail::schema_fail(where, "expected a table");
  const auto it = j.find(key);
  if (it == j.end()) detail::schema_fail(where, std::string("missing field '") + key + "'");
  return *it;
}

inline const Json* json_optional(const Json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline double json_number(const Json& j, const std::string& where) {
  if (!j.is_number()) detail::schema_fail(where, "expected a number");
  return j.get<double>();
}

inline std::size_t json_count(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    detail::schema_fail(where, "expected a nonnegative integer");
  return static_cast<std::size_t>(j.get<long long>());
}

inline std::uint64_t json_seed(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    detail::schema_fail(where, "expected a nonnegative integer seed");
  return static_cast<std::uint64_t>(j.get<long long>());
}

inline std::string json_string(const Json& j, const std::string& where) {
  if (!j.is_string()) detail::schema_fail(where, "expected a string");
  return j.get<std::string>();
}

inline std::vector<double> json_double_array(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) detail::schema_fail(where, "expected a nonempty array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(json_number(v, where));
  return out;
}

// Matrix forms: {"diag": [..]} for a real diagonal, or {"rows": [[..], ..]}
// where each entry is a real number or an [re, im] pair.
inline CMatrix parse_matrix(const Json& j, const std::string& where) {
  if (const Json* diag = json_optional(j, "diag")) {
    const std::vector<double> d = json_double_array(*diag, where + " diag");
    CMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
  if (const Json* rows = json_optional(j, "rows")) {
    if (!rows->is_array() || rows->empty())
      detail::schema_fail(where, "rows must be a nonempty array");
    const std::size_t n = rows->size();
    CMatrix m(n);
    for (std::size_t r = 0; r < n; ++r) {
      const Json& row = (*rows)[r];
      if (!row.is_array() || row.size() != n)
        detail::schema_fail(where, "rows must form a square matrix");
      for (std::size_t c = 0; c < n; ++c) {
        const Json& entry = row[c];
        if (entry.is_number()) {
          m(r, c) = entry.get<double>();
        } else if (entry.is_array() && entry.size() == 2) {
          m(r, c) = cd(json_number(entry[0], where), json_number(entry[1], where));
        } else {
          detail::schema_fail(where, "matrix entries must be numbers or [re, im] pairs");
        }
      }
    }
    return m;
  }
  detail::schema_fail(where, "expected a matrix table with 'diag' or 'rows'");
}

inline DensityOperator parse_state(const Json& j, const std::string& where) {
  return as_density(parse_matrix(j, where));
}

// Distribution forms: "uniform", an explicit weight array, or
// {"kind": "random", "seed": s}.
inline Distribution parse_distribution(const Json& j, std::size_t n, const std::string& where) {
  if (j.is_string()) {
    if (j.get<std::string>() == "uniform") return Distribution::uniform(n);
    detail::schema_fail(where, "unknown distribution name '" + j.get<std::string>() + "'");
  }
  if (j.is_array()) {
    const std::vector<double> w = json_double_array(j, where);
    if (w.size() != n)
      detail::schema_fail(where, "expected " + std::to_string(n) + " weights, got " +
                                     std::to_string(w.size()));
    return Distribution(w);
  }
  if (j.is_object()) {
    if (json_string(json_field(j, "kind", where), where) != "random")
      detail::schema_fail(where, "unknown distribution kind");
    Rng rng = make_stream(json_seed(json_field(j, "seed", where), where), 0);
    return random_distribution(n, rng);
  }
  detail::schema_fail(where, "expected a distribution");
}

// State lists are either explicit arrays of matrices or generator tables:
//   {"kind": "random_pure",  "count": n, "dim": d, "seed": s, "noise": w?}
//   {"kind": "classical",    "count": n, "dim": d, "seed": s}
//   {"kind": "orthogonal",   "dim": d}
// Generators carry their own seed so a config names its ensemble exactly.
inline std::vector<DensityOperator> parse_state_list(const Json& j, std::size_t expected,
                                                     const std::string& where) {
  std::vector<DensityOperator> states;
  if (j.is_array()) {
    if (j.empty()) detail::schema_fail(where, "state list must be nonempty");
    states.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
      states.push_back(parse_state(j[i], where + "[" + std::to_string(i) + "]"));
  } else if (j.is_object()) {
    const std::string kind = json_string(json_field(j, "kind", where), where);
    const std::size_t dim = json_count(json_field(j, "dim", where), where + " dim");
    if (kind == "orthogonal") {
      states = orthogonal_pure_states(dim);
    } else {
      std::size_t count = expected;
      if (const Json* c = json_optional(j, "count")) count = json_count(*c, where + " count");
      if (count == 0) detail::schema_fail(where, "generator needs a positive 'count'");
      Rng rng = make_stream(json_seed(json_field(j, "seed", where), where + " seed"), 0);
      if (kind == "random_pure") {
        states = random_pure_states(count, dim, rng);
        if (const Json* noise = json_optional(j, "noise"))
          states = depolarize(states, json_number(*noise, where + " noise"));
      } else if (kind == "classical") {
        states = classical_diagonal_states(count, dim, rng);
      } else {
        detail::schema_fail(where, "unknown state generator '" + kind + "'");
      }
    }
  } else {
    detail::schema_fail(where, "expected a state list or generator table");
  }
  if (expected != 0 && states.size() != expected)
    detail::schema_fail(where, "expected " + std::to_string(expected) + " states, got " +
                                   std::to_string(states.size()));
  return states;
}

inline CqEnsemble parse_cq_ensemble(const Json& j, const std::string& where) {
  std::vector<DensityOperator> states =
      parse_state_list(json_field(j, "states", where), 0, where + " states");
  Distribution weights = Distribution::uniform(states.size());
  if (const Json* w = json_optional(j, "weights"))
    weights = parse_distribution(*w, states.size(), where + " weights");
  return CqEnsemble(std::move(weights), std::move(states));
}

// Graph forms: {"kind": "cycle"|"complete", "n": ..},
// {"kind": "random_regular", "n": .., "degree": .., "seed": .., "lambda_max"?: ..},
// or explicit neighbor slots {"adjacency": [[..], ..], "degree": ..}.
inline RegularGraph parse_graph(const Json& j, const std::string& where) {
  if (const Json* adj = json_optional(j, "adjacency")) {
    if (!adj->is_array() || adj->empty())
      detail::schema_fail(where, "adjacency must be a nonempty array");
    std::vector<std::vector<std::size_t>> rows;
    rows.reserve(adj->size());
    for (const auto& row : *adj) {
      if (!row.is_array()) detail::schema_fail(where, "adjacency rows must be arrays");
      std::vector<std::size_t> slots;
      slots.reserve(row.size());
      for (const auto& v : row) slots.push_back(json_count(v, where + " adjacency"));
      rows.push_back(std::move(slots));
    }
    const std::size_t degree = rows.front().size();
    return RegularGraph(rows.size(), degree, std::move(rows));
  }
  const std::string kind = json_string(json_field(j, "kind", where), where);
  const std::size_t n = json_count(json_field(j, "n", where), where + " n");
  if (kind == "cycle") return build_cycle(n);
  if (kind == "complete") return build_complete(n);
  if (kind == "random_regular") {
    const std::size_t degree = json_count(json_field(j, "degree", where), where + " degree");
    Rng rng = make_stream(json_seed(json_field(j, "seed", where), where + " seed"), 0);
    if (const Json* lm = json_optional(j, "lambda_max")) {
      int tries = 50;
      if (const Json* mt = json_optional(j, "max_tries"))
        tries = static_cast<int>(json_count(*mt, where + " max_tries"));
      return build_random_regular_gapped(n, degree, json_number(*lm, where + " lambda_max"), rng,
                                         tries);
    }
    return build_random_regular(n, degree, rng);
  }
  detail::schema_fail(where, "unknown graph kind '" + kind + "'");
}

namespace detail {

// Marginal of a flat joint table, last axis fastest.
inline std::vector<double> flat_marginal(const std::vector<double>& joint,
                                         const std::vector<std::size_t>& alphabets,
                                         std::size_t axis) {
  std::size_t stride = 1;
  for (std::size_t i = alphabets.size(); i-- > axis + 1;) stride *= alphabets[i];
  std::vector<double> marg(alphabets[axis], 0.0);
  for (std::size_t flat = 0; flat < joint.size(); ++flat)
    marg[(flat / stride) % alphabets[axis]] += joint[flat];
  return marg;
}

}  // namespace detail

// Multipartite spec: {"alphabets": [..], "states": <list|generator>,
// "joint"?: <distribution over the flat product, last axis fastest>,
// "refs"?: [<distribution>, ..]}.  Joint defaults to uniform; references
// default to the joint marginals.
inline MultipartiteEnsemble parse_multipartite(const Json& j, const std::string& where) {
  const Json& alph = json_field(j, "alphabets", where);
  if (!alph.is_array() || alph.empty())
    detail::schema_fail(where, "alphabets must be a nonempty array");
  std::vector<std::size_t> alphabets;
  alphabets.reserve(alph.size());
  std::size_t product = 1;
  for (const auto& a : alph) {
    alphabets.push_back(json_count(a, where + " alphabets"));
    product *= alphabets.back();
  }

  Distribution joint = Distribution::uniform(product);
  if (const Json* jt = json_optional(j, "joint"))
    joint = parse_distribution(*jt, product, where + " joint");

  std::vector<Distribution> refs;
  if (const Json* r = json_optional(j, "refs")) {
    if (!r->is_array() || r->size() != alphabets.size())
      detail::schema_fail(where, "refs must list one distribution per alphabet");
    for (std::size_t i = 0; i < alphabets.size(); ++i)
      refs.push_back(parse_distribution((*r)[i], alphabets[i], where + " refs"));
  } else {
    for (std::size_t i = 0; i < alphabets.size(); ++i)
      refs.emplace_back(detail::flat_marginal(joint.weights(), alphabets, i));
  }

  std::vector<DensityOperator> table =
      parse_state_list(json_field(j, "states", where), product, where + " states");
  return MultipartiteEnsemble(std::move(alphabets), std::move(joint), std::move(refs),
                              std::move(table));
}

inline std::vector<std::vector<DensityOperator>> parse_eavesdroppers(const Json& j,
                                                                     std::size_t expected,
                                                                     const std::string& where) {
  if (!j.is_array() || j.empty())
    detail::schema_fail(where, "expected a nonempty array of eavesdropper channels");
  std::vector<std::vector<DensityOperator>> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_state_list(j[i], expected, where + "[" + std::to_string(i) + "]"));
  return out;
}

// Wiretap spec: {"receiver": <states>, "eavesdroppers": [<states>, ..],
// "input"?: <distribution>}.
inline WiretapInstance parse_wiretap(const Json& j, double eps, const std::string& where) {
  std::vector<DensityOperator> receiver =
      parse_state_list(json_field(j, "receiver", where), 0, where + " receiver");
  const std::size_t nx = receiver.size();
  Distribution input = Distribution::uniform(nx);
  if (const Json* in = json_optional(j, "input"))
    input = parse_distribution(*in, nx, where + " input");
  auto eaves =
      parse_eavesdroppers(json_field(j, "eavesdroppers", where), nx, where + " eavesdroppers");
  return WiretapInstance(std::move(input), std::move(receiver), std::move(eaves), eps);
}

// Two-sender spec: alphabet sizes, a joint law (flat "joint" with y fastest,
// or a product build from "pq"/"px"/"py"), receiver states indexed x*ny+y,
// and eavesdropper channels of the same shape.
inline QmacInstance parse_qmac(const Json& j, double eps, const std::string& where) {
  const std::size_t nq = json_count(json_field(j, "nq", where), where + " nq");
  const std::size_t nx = json_count(json_field(j, "nx", where), where + " nx");
  const std::size_t ny = json_count(json_field(j, "ny", where), where + " ny");
  if (nq == 0 || nx == 0 || ny == 0)
    detail::schema_fail(where, "alphabet sizes must be positive");

  std::vector<double> joint;
  if (const Json* flat = json_optional(j, "joint")) {
    joint = json_double_array(*flat, where + " joint");
  } else {
    const std::vector<double> pq = json_double_array(json_field(j, "pq", where), where + " pq");
    const Json& pxj = json_field(j, "px", where);
    const Json& pyj = json_field(j, "py", where);
    if (pq.size() != nq || !pxj.is_array() || pxj.size() != nq || !pyj.is_array() ||
        pyj.size() != nq)
      detail::schema_fail(where, "pq/px/py must list one entry per shared symbol");
    joint.resize(nq * nx * ny, 0.0);
    for (std::size_t q = 0; q < nq; ++q) {
      const std::vector<double> px = json_double_array(pxj[q], where + " px");
      const std::vector<double> py = json_double_array(pyj[q], where + " py");
      if (px.size() != nx || py.size() != ny)
        detail::schema_fail(where, "px/py rows must match the sender alphabets");
      for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y)
          joint[(q * nx + x) * ny + y] = pq[q] * px[x] * py[y];
    }
  }

  std::vector<DensityOperator> receiver =
      parse_state_list(json_field(j, "receiver", where), nx * ny, where + " receiver");
  auto eaves = parse_eavesdroppers(json_field(j, "eavesdroppers", where), nx * ny,
                                   where + " eavesdroppers");
  return QmacInstance(nq, nx, ny, std::move(joint), std::move(receiver), std::move(eaves), eps);
}

}  // namespace covercert

#endif
