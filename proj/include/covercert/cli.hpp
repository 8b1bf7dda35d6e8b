#ifndef COVERCERT_CLI_HPP
#define COVERCERT_CLI_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "covercert/concentration.hpp"
#include "covercert/config.hpp"
#include "covercert/divergence.hpp"
#include "covercert/ensemble.hpp"
#include "covercert/errors.hpp"
#include "covercert/expander.hpp"
#include "covercert/io.hpp"
#include "covercert/rates.hpp"
#include "covercert/report.hpp"
#include "covercert/rng.hpp"

namespace covercert {

namespace cli_detail {

struct FlagValues {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<unsigned> threads;
  std::optional<std::string> out_dir;
};

struct RunSettings {
  Json config;
  Json resolved;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  unsigned threads = 1;
  std::string out_dir;
};

inline const Json* run_entry(const Json& cfg, const char* key) {
  const Json* run = json_optional(cfg, "run");
  return run ? json_optional(*run, key) : nullptr;
}

// Precedence: command-line flag, then the [run] table, then the default.
// The seed has no default; a run that never names one is not reproducible.
inline RunSettings resolve_run(const FlagValues& flags, std::size_t default_trials) {
  if (flags.config_path.empty()) throw ConfigError("a config file is required (--config)");
  RunSettings rs;
  rs.config = load_config(flags.config_path);

  if (flags.seed) {
    rs.seed = *flags.seed;
  } else if (const Json* s = run_entry(rs.config, "seed")) {
    rs.seed = json_seed(*s, "[run] seed");
  } else {
    throw ConfigError("seed is required: pass --seed or set [run] seed");
  }

  if (flags.trials) {
    rs.trials = *flags.trials;
  } else if (const Json* t = run_entry(rs.config, "trials")) {
    rs.trials = json_count(*t, "[run] trials");
  } else {
    rs.trials = default_trials;
  }

  if (flags.threads) {
    rs.threads = *flags.threads;
  } else if (const Json* t = run_entry(rs.config, "threads")) {
    rs.threads = static_cast<unsigned>(json_count(*t, "[run] threads"));
  } else {
    rs.threads = 1;
  }
  if (rs.threads == 0) throw ConfigError("[run] threads must be positive");

  if (flags.out_dir) {
    rs.out_dir = *flags.out_dir;
  } else if (const Json* o = run_entry(rs.config, "out_dir")) {
    rs.out_dir = json_string(*o, "[run] out_dir");
  } else {
    rs.out_dir = ".";
  }

  rs.resolved = rs.config;
  if (!rs.resolved.is_object()) rs.resolved = Json::object();
  rs.resolved["run"]["seed"] = rs.seed;
  rs.resolved["run"]["trials"] = rs.trials;
  rs.resolved["run"]["threads"] = rs.threads;
  rs.resolved["run"]["out_dir"] = rs.out_dir;
  return rs;
}

inline const Json& config_section(const Json& cfg, const std::string& name) {
  const Json* sec = json_optional(cfg, name.c_str());
  if (!sec) throw ConfigError("config needs a [" + name + "] section");
  return *sec;
}

// Grids accept a scalar or a nonempty array.
inline std::vector<double> grid_double(const Json& sec, const char* key, const std::string& where) {
  const Json& j = json_field(sec, key, where);
  if (j.is_number()) return {j.get<double>()};
  if (j.is_array() && !j.empty()) return json_double_array(j, where);
  throw ConfigError(where + ": '" + key + "' must be a number or a nonempty array");
}

inline std::vector<std::size_t> grid_count(const Json& sec, const char* key,
                                           const std::string& where) {
  const Json& j = json_field(sec, key, where);
  if (j.is_number_integer()) return {json_count(j, where)};
  if (j.is_array() && !j.empty()) {
    std::vector<std::size_t> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(json_count(v, where));
    return out;
  }
  throw ConfigError(where + ": '" + key + "' must be an integer or a nonempty array");
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

inline std::string join_sizes(const std::vector<std::size_t>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i > 0) out += 'x';
    out += std::to_string(sizes[i]);
  }
  return out;
}

// Writes the CSV and the JSON summary, then raises the validation failure so
// the outputs always land on disk before a nonzero exit.
inline void finish_report(const std::string& name, const RunSettings& rs, const CsvTable& table,
                          Json results, std::size_t failures) {
  const std::filesystem::path dir(rs.out_dir);
  const std::string csv_path = (dir / (name + ".csv")).string();
  const std::string summary_path = (dir / (name + "_summary.json")).string();

  Json summary;
  summary["subcommand"] = name;
  summary["csv"] = name + ".csv";
  summary["rows"] = table.rows.size();
  summary["failures"] = failures;
  summary["resolved"] = rs.resolved;
  summary["results"] = std::move(results);

  write_text_file(csv_path, table.serialize());
  write_text_file(summary_path, summary.dump(2) + "\n");
  std::cout << "wrote " << csv_path << "\n";
  std::cout << "wrote " << summary_path << "\n";
  if (failures > 0)
    throw ValidationFailure(std::to_string(failures) + " row(s) violated a certified bound, see " +
                            csv_path);
}

inline void run_divergences(RunSettings& rs) {
  const Json& sec = config_section(rs.config, "divergences");
  const CqEnsemble e =
      parse_cq_ensemble(json_field(sec, "ensemble", "[divergences]"), "[divergences] ensemble");
  const std::vector<double> eps_grid = grid_double(sec, "eps", "[divergences] eps");

  CsvTable table({"theorem", "eps", "shannon_bits", "renyi2_bits", "max_bits",
                  "smooth_renyi2_bits", "smooth_max_bits", "hypothesis_ok", "pass"});
  Json results;
  std::size_t failures = 0;
  const double tol = 1e-9;
  for (double eps : eps_grid) {
    const MutualInformationReport r = mutual_informations(e, SmoothingBudget(eps));
    const bool ordered = r.shannon <= r.renyi2 + tol && r.renyi2 <= r.renyi_max + tol &&
                         r.smooth_renyi2.bits <= r.renyi2 + tol &&
                         r.smooth_renyi_max.bits <= r.renyi_max + tol;
    if (!ordered) ++failures;
    table.add_row({csv_cell("divergence-ordering"), csv_cell(eps), csv_cell(r.shannon),
                   csv_cell(r.renyi2), csv_cell(r.renyi_max), csv_cell(r.smooth_renyi2.bits),
                   csv_cell(r.smooth_renyi_max.bits), csv_cell(true), csv_cell(ordered)});
    results["shannon_bits"] = r.shannon;
    results["renyi2_bits"] = r.renyi2;
    results["max_bits"] = r.renyi_max;
  }
  finish_report("divergences", rs, table, std::move(results), failures);
}

inline void run_spectral(RunSettings& rs) {
  const Json& sec = config_section(rs.config, "spectral");
  const RegularGraph g = parse_graph(json_field(sec, "graph", "[spectral]"), "[spectral] graph");
  std::size_t t_max = 8;
  if (const Json* t = json_optional(sec, "t_max")) t_max = json_count(*t, "[spectral] t_max");
  rs.resolved["spectral"]["t_max"] = t_max;

  const SpectralProfile prof = second_eigenvalue(g);
  const std::vector<double> deviation = walk_deviation_profile(g, t_max);

  CsvTable table({"theorem", "n", "degree", "lambda", "t", "deviation", "mixing_bound",
                  "hypothesis_ok", "pass"});
  Json results;
  std::size_t failures = 0;
  for (std::size_t t = 0; t <= t_max; ++t) {
    const double bound = deviation[0] * std::pow(prof.lambda, static_cast<double>(t));
    const bool ok = deviation[t] <= bound * (1.0 + 1e-6) + 1e-12;
    const bool pass = !prof.expander() || ok;
    if (!pass) ++failures;
    table.add_row({csv_cell("expander-mixing"), csv_cell(g.size()), csv_cell(g.degree()),
                   csv_cell(prof.lambda), csv_cell(t), csv_cell(deviation[t]), csv_cell(bound),
                   csv_cell(prof.expander()), csv_cell(pass)});
  }
  results["lambda"] = prof.lambda;
  results["expander"] = prof.expander();
  results["deviation_final"] = deviation.back();
  finish_report("spectral", rs, table, std::move(results), failures);
}

inline void run_covering_iid(RunSettings& rs) {
  const Json& sec = config_section(rs.config, "covering-iid");
  const std::string where = "[covering-iid]";
  const MultipartiteEnsemble e =
      parse_multipartite(json_field(sec, "ensemble", where), where + " ensemble");
  const double eps = json_number(json_field(sec, "eps", where), where + " eps");
  const std::vector<double> deltas = grid_double(sec, "delta", where + " delta");

  const Json& sj = json_field(sec, "sizes", where);
  if (!sj.is_array() || sj.empty()) throw ConfigError(where + ": sizes must be a nonempty array");
  std::vector<std::vector<std::size_t>> size_grid;
  for (const auto& entry : sj) {
    if (entry.is_number_integer()) {
      size_grid.emplace_back(e.parts(), json_count(entry, where + " sizes"));
    } else if (entry.is_array() && entry.size() == e.parts()) {
      std::vector<std::size_t> sizes;
      for (const auto& v : entry) sizes.push_back(json_count(v, where + " sizes"));
      size_grid.push_back(std::move(sizes));
    } else {
      throw ConfigError(where + ": each sizes entry must be an integer or one count per alphabet");
    }
  }

  CsvTable table({"theorem", "parties", "sizes", "eps", "delta", "trials", "mean_distance",
                  "expectation_cap", "tail_threshold", "tail_point", "ci_lo", "ci_hi", "bound",
                  "hypothesis_ok", "pass"});
  Json results;
  std::size_t failures = 0;
  std::uint64_t combo = 0;
  for (const auto& sizes : size_grid) {
    for (double delta : deltas) {
      const CoveringExperiment out = covering_experiment_iid(
          e, sizes, eps, delta, rs.trials, derive_seed(rs.seed, combo++), rs.threads);
      const bool hypothesis = out.condition.all_hold;
      const bool bound_ok = out.tail.ci95.lo <= out.bound + 1e-12;
      const bool pass = !hypothesis || bound_ok;
      if (!pass) ++failures;
      table.add_row({csv_cell("multipartite-covering-concentration"), csv_cell(e.parts()),
                     csv_cell(join_sizes(sizes)), csv_cell(eps), csv_cell(delta),
                     csv_cell(rs.trials), csv_cell(out.mean_distance),
                     csv_cell(out.expectation_cap), csv_cell(out.tail.threshold),
                     csv_cell(out.tail.point), csv_cell(out.tail.ci95.lo),
                     csv_cell(out.tail.ci95.hi), csv_cell(out.bound), csv_cell(hypothesis),
                     csv_cell(pass)});
      results["mean_distance"] = out.mean_distance;
      results["bound"] = out.bound;
    }
  }
  finish_report("covering-iid", rs, table, std::move(results), failures);
}

inline void run_covering_expander(RunSettings& rs) {
  const Json& sec = config_section(rs.config, "covering-expander");
  const std::string where = "[covering-expander]";
  const CqEnsemble e = parse_cq_ensemble(json_field(sec, "ensemble", where), where + " ensemble");
  const RegularGraph g = parse_graph(json_field(sec, "graph", where), where + " graph");
  const double eps = json_number(json_field(sec, "eps", where), where + " eps");
  const std::vector<double> deltas = grid_double(sec, "delta", where + " delta");
  const std::vector<std::size_t> walks = grid_count(sec, "walk_length", where + " walk_length");
  double garg = 1.0;
  if (const Json* gc = json_optional(sec, "garg_constant"))
    garg = json_number(*gc, where + " garg_constant");
  rs.resolved["covering-expander"]["garg_constant"] = garg;

  const SpectralProfile prof = second_eigenvalue(g);

  CsvTable table({"theorem", "n", "degree", "lambda", "walk_length", "eps", "delta", "trials",
                  "mean_distance", "expectation_cap", "tail_threshold", "tail_point", "ci_lo",
                  "ci_hi", "bound", "bound_proof_variant", "garg_baseline", "min_entropy_bits",
                  "condition_required", "condition_actual", "lambda_below_quarter",
                  "condition_holds", "hypothesis_ok", "pass"});
  Json results;
  std::size_t failures = 0;
  std::uint64_t combo = 0;
  for (std::size_t k : walks) {
    for (double delta : deltas) {
      const ExpanderExperiment out =
          covering_experiment_expander(e, g, prof, k, eps, delta, rs.trials,
                                       derive_seed(rs.seed, combo++), rs.threads, garg);
      const bool hypothesis = out.lambda_below_quarter && out.condition_holds;
      const bool bound_ok = out.tail.ci95.lo <= out.bound + 1e-12;
      const bool pass = !hypothesis || bound_ok;
      if (!pass) ++failures;
      table.add_row({csv_cell("expander-covering-concentration"), csv_cell(g.size()),
                     csv_cell(g.degree()), csv_cell(out.lambda), csv_cell(k), csv_cell(eps),
                     csv_cell(delta), csv_cell(rs.trials), csv_cell(out.mean_distance),
                     csv_cell(out.expectation_cap), csv_cell(out.tail.threshold),
                     csv_cell(out.tail.point), csv_cell(out.tail.ci95.lo),
                     csv_cell(out.tail.ci95.hi), csv_cell(out.bound),
                     csv_cell(out.bound_proof_variant), csv_cell(out.garg_baseline),
                     csv_cell(out.min_entropy_bits), csv_cell(out.condition_required),
                     csv_cell(out.condition_actual), csv_cell(out.lambda_below_quarter),
                     csv_cell(out.condition_holds), csv_cell(hypothesis), csv_cell(pass)});
      results["mean_distance"] = out.mean_distance;
      results["bound"] = out.bound;
      results["garg_baseline"] = out.garg_baseline;
    }
  }
  results["lambda"] = prof.lambda;
  finish_report("covering-expander", rs, table, std::move(results), failures);
}

inline void run_excision_verify(RunSettings& rs) {
  const Json& sec = config_section(rs.config, "excision-verify");
  const std::string where = "[excision-verify]";
  const CqEnsemble e = parse_cq_ensemble(json_field(sec, "ensemble", where), where + " ensemble");
  const RegularGraph g = parse_graph(json_field(sec, "graph", where), where + " graph");
  if (g.size() != e.size())
    throw ConfigError(where + ": graph vertices must index the ensemble alphabet");
  const std::size_t walk_length =
      json_count(json_field(sec, "walk_length", where), where + " walk_length");
  std::size_t samples = rs.trials;
  if (const Json* s = json_optional(sec, "samples")) samples = json_count(*s, where + " samples");
  rs.resolved["excision-verify"]["samples"] = samples;
  const std::vector<double> eps_grid = grid_double(sec, "eps", where + " eps");

  const ExcisionFamily fam = trace_distance_family(e, walk_length);
  const ExcisionCheckReport report = verify_excision_family(fam, g, samples, rs.seed);
  const SpectralProfile prof = second_eigenvalue(g);
  const ExcisionParameters params =
      excision_parameters(walk_length, g.size(), prof.lambda, fam.cap, fam.bounds);

  CsvTable table({"theorem", "walk_length", "x_size", "lambda", "samples", "violations",
                  "worst_slack", "excision_a", "sum_d_squared", "eps", "bound", "hypothesis_ok",
                  "pass"});
  Json results;
  std::size_t failures = 0;
  for (double eps : eps_grid) {
    const double bound = bound_bounded_excision(params, eps);
    const bool pass = report.ok();
    if (!pass) ++failures;
    table.add_row({csv_cell("bounded-excision"), csv_cell(walk_length), csv_cell(g.size()),
                   csv_cell(prof.lambda), csv_cell(report.samples), csv_cell(report.violations),
                   csv_cell(report.worst_slack), csv_cell(params.a),
                   csv_cell(params.sum_d_squared()), csv_cell(eps), csv_cell(bound),
                   csv_cell(report.ok()), csv_cell(pass)});
  }
  results["violations"] = report.violations;
  results["worst_slack"] = report.worst_slack;
  results["sum_d_squared"] = params.sum_d_squared();
  finish_report("excision-verify", rs, table, std::move(results), failures);
}

inline void run_bounds(RunSettings& rs) {
  const Json& sec = config_section(rs.config, "bounds");
  const std::string where = "[bounds]";
  const std::size_t x_size = json_count(json_field(sec, "x_size", where), where + " x_size");
  const double lambda = json_number(json_field(sec, "lambda", where), where + " lambda");
  const std::vector<std::size_t> walks = grid_count(sec, "walk_length", where + " walk_length");
  const std::vector<double> deltas = grid_double(sec, "delta", where + " delta");
  double eps = 0.1;
  if (const Json* v = json_optional(sec, "eps")) eps = json_number(*v, where + " eps");
  std::size_t dim = 2;
  if (const Json* v = json_optional(sec, "dim")) dim = json_count(*v, where + " dim");
  double cap = 2.0;
  if (const Json* v = json_optional(sec, "cap")) cap = json_number(*v, where + " cap");
  rs.resolved["bounds"]["eps"] = eps;
  rs.resolved["bounds"]["dim"] = dim;
  rs.resolved["bounds"]["cap"] = cap;

  CsvTable table({"theorem", "x_size", "lambda", "walk_length", "delta", "eps", "dim",
                  "expander_bound", "expander_bound_proof_variant", "iid_baseline",
                  "garg_baseline", "excision_a", "excision_d_first", "excision_sum_d_squared",
                  "excision_bound", "hypothesis_ok", "pass"});
  Json results;
  for (std::size_t k : walks) {
    ExcisionBounds window;
    const double inv_k = 1.0 / static_cast<double>(k);
    window.upper = [inv_k](std::size_t l1, std::size_t l2) {
      return static_cast<double>(l2 - l1 + 1) * inv_k;
    };
    window.lower = [inv_k](std::size_t l1, std::size_t l2) {
      return -static_cast<double>(l2 - l1 + 1) * inv_k;
    };
    const ExcisionParameters params = excision_parameters(k, x_size, lambda, cap, window);
    for (double delta : deltas) {
      const double expander_bound = bound_expander_conc(x_size, k, lambda, delta);
      const double proof_variant = bound_expander_conc(x_size, k, lambda, delta, 8.0);
      const double iid_baseline = bound_unipartite_chernoff(static_cast<double>(k), delta);
      const double garg = bound_garg_baseline(dim, eps, lambda, k);
      const double excision_bound = bound_bounded_excision(params, delta);
      table.add_row({csv_cell("expander-concentration"), csv_cell(x_size), csv_cell(lambda),
                     csv_cell(k), csv_cell(delta), csv_cell(eps), csv_cell(dim),
                     csv_cell(expander_bound), csv_cell(proof_variant), csv_cell(iid_baseline),
                     csv_cell(garg), csv_cell(params.a), csv_cell(params.d.front()),
                     csv_cell(params.sum_d_squared()), csv_cell(excision_bound),
                     csv_cell(lambda < 0.25), csv_cell(true)});
      results["expander_bound"] = expander_bound;
      results["excision_d_first"] = params.d.front();
    }
  }
  finish_report("bounds", rs, table, std::move(results), 0);
}

inline void run_rates(RunSettings& rs) {
  const Json& sec = config_section(rs.config, "rates");
  const std::string where = "[rates]";
  const double eps = json_number(json_field(sec, "eps", where), where + " eps");
  const std::string kind = json_string(json_field(sec, "kind", where), where + " kind");

  CsvTable table({"theorem", "kind", "eps", "name", "value", "hypothesis_ok", "pass"});
  Json results;
  auto emit = [&](const char* theorem, const std::string& name, double value) {
    table.add_row({csv_cell(theorem), csv_cell(kind), csv_cell(eps), csv_cell(name),
                   csv_cell(value), csv_cell(true), csv_cell(true)});
    results[name] = value;
  };

  if (kind == "wiretap") {
    const WiretapInstance w =
        parse_wiretap(json_field(sec, "wiretap", where), eps, where + " wiretap");
    const WiretapRateReport rep = wiretap_rate_bound(w);
    emit("wiretap-rate", "rate", rep.rate);
    emit("wiretap-rate", "receiver_bits", rep.receiver_bits);
    for (std::size_t i = 0; i < rep.eavesdropper_bits.size(); ++i)
      emit("wiretap-rate", "eavesdropper_bits_" + std::to_string(i), rep.eavesdropper_bits[i]);
    emit("wiretap-rate", "penalty", rep.penalty);
    emit("wiretap-rate", "error_guarantee", rep.error_guarantee);
    emit("wiretap-rate", "privacy_guarantee", rep.privacy_guarantee);
  } else if (kind == "qmac") {
    const QmacInstance m = parse_qmac(json_field(sec, "qmac", where), eps, where + " qmac");
    const QmacRegion reg = qmac_rate_region(m);
    emit("qmac-rate-region", "r1_bound", reg.r1_bound);
    emit("qmac-rate-region", "r2_bound", reg.r2_bound);
    emit("qmac-rate-region", "sum_bound", reg.sum_bound);
    emit("qmac-rate-region", "receiver_r1", reg.receiver_r1);
    emit("qmac-rate-region", "receiver_r2", reg.receiver_r2);
    emit("qmac-rate-region", "receiver_sum", reg.receiver_sum);
    for (std::size_t i = 0; i < reg.eavesdropper_r1.size(); ++i) {
      emit("qmac-rate-region", "eavesdropper_r1_" + std::to_string(i), reg.eavesdropper_r1[i]);
      emit("qmac-rate-region", "eavesdropper_r2_" + std::to_string(i), reg.eavesdropper_r2[i]);
      emit("qmac-rate-region", "eavesdropper_sum_" + std::to_string(i), reg.eavesdropper_sum[i]);
    }
    emit("qmac-rate-region", "penalty", reg.penalty);
    emit("qmac-rate-region", "error_guarantee", reg.error_guarantee);
    emit("qmac-rate-region", "privacy_guarantee", reg.privacy_guarantee);
    const QmacIidRegion iid = qmac_iid_region(m);
    emit("qmac-iid-region", "iid_r1_bound", iid.r1_bound);
    emit("qmac-iid-region", "iid_r2_bound", iid.r2_bound);
    emit("qmac-iid-region", "iid_sum_bound", iid.sum_bound);
    if (const Json* pts = json_optional(sec, "points")) {
      if (!pts->is_array()) throw ConfigError(where + ": points must be an array of [r1, r2]");
      for (const auto& pt : *pts) {
        if (!pt.is_array() || pt.size() != 2)
          throw ConfigError(where + ": points must be an array of [r1, r2]");
        const double r1 = json_number(pt[0], where + " points");
        const double r2 = json_number(pt[1], where + " points");
        emit("qmac-rate-region", "contains(" + format_g17(r1) + ";" + format_g17(r2) + ")",
             reg.contains(r1, r2) ? 1.0 : 0.0);
      }
    }
  } else {
    throw ConfigError(where + ": kind must be 'wiretap' or 'qmac'");
  }
  finish_report("rates", rs, table, std::move(results), 0);
}

inline void dispatch(const std::string& name, const FlagValues& flags) {
  RunSettings rs = resolve_run(flags, 200);
  if (name == "divergences") run_divergences(rs);
  else if (name == "spectral") run_spectral(rs);
  else if (name == "covering-iid") run_covering_iid(rs);
  else if (name == "covering-expander") run_covering_expander(rs);
  else if (name == "excision-verify") run_excision_verify(rs);
  else if (name == "bounds") run_bounds(rs);
  else if (name == "rates") run_rates(rs);
  else throw ConfigError("unknown subcommand: " + name);
}

}  // namespace cli_detail

// Exit codes: 0 success, 1 a certified bound failed its check (outputs are
// still written), 2 configuration or usage problems, 3 unexpected errors.
inline int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"certificates and experiments for matrix covering concentration", "covercert"};
  app.require_subcommand(1);

  cli_detail::FlagValues flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"divergences", "information quantities of a cq ensemble over a smoothing grid"},
      {"spectral", "second eigenvalue and exact mixing profile of a regular graph"},
      {"covering-iid", "iid sampled covering error against the concentration bound"},
      {"covering-expander", "expander walk covering error against the concentration bound"},
      {"excision-verify", "sandwich and cap checks for the excised walk statistic"},
      {"bounds", "closed-form tail bounds and excision constants on a grid"},
      {"rates", "certified wiretap rate or two-sender rate region"},
  };
  for (const auto& [name, desc] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", flags.config_path, "config file, TOML or JSON");
    sub->add_option("--seed", flags.seed, "master seed, overrides [run] seed");
    sub->add_option("--trials", flags.trials, "Monte Carlo trials, overrides [run] trials");
    sub->add_option("--threads", flags.threads, "worker threads, overrides [run] threads");
    sub->add_option("--out-dir", flags.out_dir, "output directory, overrides [run] out_dir");
  }

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("covercert");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    cli_detail::dispatch(app.get_subcommands().front()->get_name(), flags);
    return 0;
  } catch (const ValidationFailure& e) {
    std::cerr << "validation failure: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace covercert

#endif
