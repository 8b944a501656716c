#ifndef SOLGEO_EXPERIMENT_HPP
#define SOLGEO_EXPERIMENT_HPP

// Batch experiments behind the `solgeo` command line tool: configuration
// schema, dispatch to the library and report assembly.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "solgeo/distance_estimator.hpp"
#include "solgeo/harmonic.hpp"
#include "solgeo/io.hpp"
#include "solgeo/limit_stats.hpp"
#include "solgeo/parallel.hpp"

namespace solgeo {

enum class Command { simulate, clt, escape, tails, deviation, boundary, harmonic, geometry };

inline const std::vector<std::pair<Command, const char*>>& command_names() {
  static const std::vector<std::pair<Command, const char*>> names{
      {Command::simulate, "simulate"}, {Command::clt, "clt"},
      {Command::escape, "escape"},     {Command::tails, "tails"},
      {Command::deviation, "deviation"}, {Command::boundary, "boundary"},
      {Command::harmonic, "harmonic"}, {Command::geometry, "geometry"}};
  return names;
}

inline const char* to_string(Command c) {
  for (const auto& [cmd, name] : command_names())
    if (cmd == c) return name;
  return "?";
}

inline std::optional<Command> parse_command(const std::string& s) {
  for (const auto& [cmd, name] : command_names())
    if (s == name) return cmd;
  return std::nullopt;
}

struct RunSettings {
  double dt = 1e-3;
  double T = 0.0;
  std::uint64_t N = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  Scheme scheme = Scheme::euler;
};

struct ExperimentConfig {
  Command command = Command::simulate;
  SolParams params;
  RunSettings run;
  Json options = Json::object();  // command specific, defaults filled in
  std::filesystem::path out_dir = ".";
};

/// Command-line values that take precedence over the JSON document.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
};

namespace detail {

struct RunNeeds {
  bool dt, T, N, seed;
};

inline RunNeeds run_needs(Command c) {
  switch (c) {
    case Command::simulate: return {true, true, false, true};
    case Command::tails: return {true, false, true, true};
    case Command::harmonic: return {false, false, false, false};
    case Command::geometry: return {false, false, false, false};
    default: return {true, true, true, true};
  }
}

// Reads options.<key> with a default and records the resolved value.
class OptionReader {
 public:
  OptionReader(const Json& j, Json& resolved) : r_(j, "options"), out_(resolved) {}
  double number(const char* key, double fallback) {
    const double v = r_.number(key, fallback);
    out_[key] = v;
    return v;
  }
  double positive(const char* key, double fallback) {
    const double v = r_.positive(key, fallback);
    out_[key] = v;
    return v;
  }
  std::uint64_t count(const char* key, std::uint64_t fallback) {
    const auto v = r_.count(key, fallback);
    out_[key] = v;
    return v;
  }
  bool boolean(const char* key, bool fallback) {
    const bool v = r_.boolean(key, fallback);
    out_[key] = v;
    return v;
  }
  const JsonReader& reader() const { return r_; }
  Json& resolved() { return out_; }

 private:
  JsonReader r_;
  Json& out_;
};

}  // namespace detail

/// Validates a configuration document. `cli_command`, if given, must agree
/// with a "command" field in the document (when present).
inline ExperimentConfig parse_config(const Json& doc, std::optional<Command> cli_command,
                                     const Overrides& ov = {}) {
  const JsonReader root(doc, "");
  root.only({"command", "params", "run", "options", "output"});
  ExperimentConfig cfg;
  if (root.has("command")) {
    const auto c = parse_command(root.string("command", ""));
    if (!c) throw SchemaError("command", "unknown command");
    if (cli_command && *cli_command != *c)
      throw SchemaError("command", "does not match the command given on the command line");
    cfg.command = *c;
  } else if (cli_command) {
    cfg.command = *cli_command;
  } else {
    throw SchemaError("command", "missing required field");
  }

  const auto params = root.object("params");
  params.only({"p", "q", "a"});
  cfg.params = {params.positive("p"), params.positive("q"), params.number("a")};

  const auto needs = detail::run_needs(cfg.command);
  const Json empty = Json::object();
  const JsonReader run(root.has("run") ? root.raw("run") : empty, "run");
  if (!root.has("run") && (needs.dt || needs.T || needs.N || needs.seed))
    throw SchemaError("run", "missing required field");
  run.only({"dt", "T", "N", "seed", "workers", "scheme"});
  cfg.run.dt = needs.dt ? run.positive("dt") : run.positive("dt", 1e-3);
  cfg.run.T = needs.T ? run.positive("T") : run.positive("T", 0.0);
  if (cfg.command == Command::tails && !run.has("T")) cfg.run.T = y_infinity_horizon(cfg.params);
  if (needs.N) {
    cfg.run.N = run.count("N");
    if (cfg.run.N < 1) throw SchemaError("run.N", "must be at least 1");
  } else {
    cfg.run.N = run.count("N", 1);
  }
  cfg.run.seed = needs.seed ? run.count("seed") : run.count("seed", 0);
  cfg.run.workers = static_cast<unsigned>(run.count("workers", default_workers()));
  const std::string scheme = run.string("scheme", "euler");
  if (scheme == "euler") cfg.run.scheme = Scheme::euler;
  else if (scheme == "time-change") cfg.run.scheme = Scheme::time_change;
  else throw SchemaError("run.scheme", "expected \"euler\" or \"time-change\"");
  if (ov.seed) cfg.run.seed = *ov.seed;
  if (ov.workers) cfg.run.workers = *ov.workers;
  if (cfg.run.workers < 1) throw SchemaError("run.workers", "must be at least 1");

  if (root.has("options")) {
    if (!root.raw("options").is_object()) throw SchemaError("options", "expected an object");
    cfg.options = root.raw("options");
  }
  if (root.has("output")) {
    const auto out = root.object("output");
    out.only({"dir"});
    cfg.out_dir = out.string("dir", ".");
  }
  if (ov.out) cfg.out_dir = *ov.out;
  return cfg;
}

struct ExperimentResult {
  Json report;
  std::optional<SampleSet> samples;
  std::optional<BrownianPath> path;
  [[nodiscard]] bool pass() const { return report.value("pass", false); }
};

namespace detail {

inline SimConfig sim_config(const ExperimentConfig& cfg) {
  SimConfig s;
  s.params = cfg.params;
  s.dt = cfg.run.dt;
  s.T = cfg.run.T;
  s.seed = cfg.run.seed;
  s.scheme = cfg.run.scheme;
  return s;
}

inline void reject_unknown_options(const Json& given, const Json& resolved) {
  for (const auto& [k, _] : given.items())
    if (!resolved.contains(k)) throw SchemaError("options." + k, "unknown field");
}

struct Collector {
  RunEcho echo;
  std::vector<TestReport> reports;
  Json details = Json::object();
  void add(const std::string& name, double value, double threshold, std::size_t n) {
    reports.push_back(make_report(name, value, threshold, n, echo.seed));
  }
};

inline void run_simulate(const ExperimentConfig& cfg, Json& opts, Collector& col,
                         ExperimentResult& res) {
  OptionReader o(cfg.options, opts);
  SimConfig sc = sim_config(cfg);
  sc.decimate = static_cast<std::size_t>(std::max<std::uint64_t>(1, o.count("decimate", 1)));
  reject_unknown_options(cfg.options, opts);
  sc.validate();
  const auto paths = parallel_map(cfg.run.N, cfg.run.workers, [&](std::size_t i) {
    return simulate(sc, i);
  });
  std::size_t truncated = 0, vp_bad = 0, vq_bad = 0;
  SampleSet xt{"X_T", {}, cfg.run.T};
  for (const auto& p : paths) {
    truncated += p.status == PathStatus::truncated;
    for (std::size_t i = 1; i < p.size(); ++i) {
      vp_bad += p.Vp[i] < p.Vp[i - 1];
      vq_bad += p.Vq[i] < p.Vq[i - 1];
    }
    if (p.size() > 0) xt.values.push_back(p.X.back());
  }
  col.add("truncated_paths", static_cast<double>(truncated), 0.0, paths.size());
  col.add("vp_monotonicity_violations", static_cast<double>(vp_bad), 0.0, paths.size());
  col.add("vq_monotonicity_violations", static_cast<double>(vq_bad), 0.0, paths.size());
  res.path = paths.front();
  res.samples = std::move(xt);
}

inline void run_clt(const ExperimentConfig& cfg, Json& opts, Collector& col,
                    ExperimentResult& res) {
  OptionReader o(cfg.options, opts);
  const double ks_tol = o.positive("ks_threshold", 0.06);
  // Z_t - a t is exactly Gaussian: default to the 1% critical value of KS.
  const double exact_tol =
      o.positive("exact_ks_threshold", 1.63 / std::sqrt(static_cast<double>(cfg.run.N)));
  const double q95_tol = o.positive("quantile_threshold", 0.5);
  const auto ref_steps = o.count("reference_steps", 100000);
  const auto ref_seed = o.count("reference_seed", cfg.run.seed + 1);
  const bool distance = o.boolean("distance", false);
  const double dist_tol = o.positive("distance_ks_threshold", 0.08);
  reject_unknown_options(cfg.options, opts);
  const SimConfig sc = sim_config(cfg);
  const auto s = clt_sample(sc, cfg.run.N, cfg.run.T, cfg.run.workers);
  const std::size_t n = s.N();
  const auto& prm = cfg.params;
  const ReferenceLaw law{ReferenceLaw::Kind::scaled_bm_functional, prm.p, prm.q};
  std::optional<TripleSampleSet> ref;
  auto bm_reference = [&]() -> const TripleSampleSet& {
    if (!ref) ref = reference_sample(law, n, ref_steps, ref_seed, cfg.run.workers);
    return *ref;
  };
  auto q95 = [](const SampleSet& v) {
    std::vector<double> a;
    for (double x : v.values) a.push_back(std::fabs(x));
    return quantile(a, 0.95);
  };
  if (prm.a > 0.0) {
    SampleSet first = s.first;
    for (double& v : first.values) v /= prm.p;
    col.add("ks_first_vs_p_normal", ks_statistic(first, ReferenceLaw{}), ks_tol, n);
    col.add("q95_abs_second", q95(s.second), q95_tol, n);
  } else if (prm.a < 0.0) {
    SampleSet second = s.second;
    for (double& v : second.values) v /= -prm.q;
    col.add("ks_second_vs_q_normal", ks_statistic(second, ReferenceLaw{}), ks_tol, n);
    col.add("q95_abs_first", q95(s.first), q95_tol, n);
  } else {
    col.add("ks_first_vs_p_max", ks_statistic(s.first, bm_reference().first), ks_tol, n);
    col.add("ks_second_vs_q_min", ks_statistic(s.second, bm_reference().second), ks_tol, n);
  }
  col.add("ks_third_vs_normal", ks_statistic(s.third, ReferenceLaw{}), exact_tol, n);
  res.samples = s.first;
  if (!distance) return;
  const auto d = dist_clt_sample(sc, cfg.run.N, cfg.run.T, cfg.run.workers);
  if (prm.a != 0.0) {
    col.add("ks_distance_vs_normal", ks_statistic(d, ReferenceLaw{}), dist_tol, d.N());
  } else {
    col.add("ks_distance_vs_reference", ks_statistic(d, distance_reference(bm_reference(), law)),
            dist_tol, d.N());
  }
}

inline void run_escape(const ExperimentConfig& cfg, Json& opts, Collector& col,
                       ExperimentResult&) {
  OptionReader o(cfg.options, opts);
  const double max_width = o.positive("max_width", 0.3);
  const double high_max = o.positive("high_max", 0.25);
  const double z = o.positive("se_multiple", 3.0);
  reject_unknown_options(cfg.options, opts);
  const auto r = escape_rate(sim_config(cfg), cfg.run.T, cfg.run.N, cfg.run.workers);
  const double abs_a = std::fabs(cfg.params.a);
  col.details["low"] = r.low;
  col.details["high"] = r.high;
  col.details["se_low"] = r.se_low;
  col.details["se_high"] = r.se_high;
  col.details["skipped"] = r.skipped;
  if (cfg.params.a != 0.0) {
    // |a| must lie in [low, high] up to z Monte Carlo standard errors.
    const double miss = std::max({0.0, r.low - z * r.se_low - abs_a, abs_a - r.high - z * r.se_high});
    col.add("escape_interval_miss", miss, 0.0, r.used);
    col.add("escape_interval_width", r.high - r.low, max_width, r.used);
  } else {
    col.add("escape_high", r.high, high_max, r.used);
  }
}

inline void run_tails(const ExperimentConfig& cfg, Json& opts, Collector& col,
                      ExperimentResult& res) {
  OptionReader o(cfg.options, opts);
  const auto n = cfg.run.N;
  const auto k = o.count("k", std::max<std::uint64_t>(1000, n / 50));
  const double rel_tol = o.positive("rel_tol", 0.15);
  reject_unknown_options(cfg.options, opts);
  if (!(cfg.params.a > 0.0)) throw SchemaError("params.a", "tails requires a > 0");
  const SimConfig sc = sim_config(cfg);
  const double t_inf = cfg.run.T;
  col.details["cutoff"] = t_inf;
  const auto s = y_infinity_sample(sc, n, t_inf, cfg.run.workers);
  const double target = 2.0 * cfg.params.a / cfg.params.q;
  const auto est = tail_exponent(s.values, k);
  col.details["target_kappa"] = target;
  col.details["kappa_hat"] = est.kappa_hat;
  col.details["ci"] = {est.ci_low, est.ci_high};
  Json sweep = Json::array();
  for (std::uint64_t kk : {k / 2, 2 * k}) {
    if (kk < 1 || kk > n / 10) continue;
    const auto e = tail_exponent(s.values, kk);
    sweep.push_back({{"k", kk}, {"kappa_hat", e.kappa_hat}});
  }
  col.details["k_sweep"] = sweep;
  col.add("tail_exponent_relative_error", std::fabs(est.kappa_hat - target) / target, rel_tol, n);
  res.samples = s;
}

inline void run_deviation(const ExperimentConfig& cfg, Json& opts, Collector& col,
                          ExperimentResult& res) {
  OptionReader o(cfg.options, opts);
  const double slack = o.positive("slack", 1.0);
  const double coverage = o.positive("coverage", 0.95);
  const double lead = o.positive("lead", 60.0);
  reject_unknown_options(cfg.options, opts);
  if (!(cfg.params.a > 0.0)) throw SchemaError("params.a", "deviation requires a > 0");
  const SimConfig sc = sim_config(cfg);
  const auto summaries = parallel_map(cfg.run.N, cfg.run.workers, [&](std::size_t i) {
    return deviation_summary_stable(sc, i, cfg.run.T, lead);
  });
  const double bound = 2.0 / std::fabs(cfg.params.a) + slack;
  std::size_t over = 0;
  for (double v : summaries) over += !(v <= bound);
  col.details["bound"] = bound;
  col.details["max_summary"] = *std::max_element(summaries.begin(), summaries.end());
  col.add("deviation_exceed_fraction", static_cast<double>(over) / summaries.size(),
          1.0 - coverage, summaries.size());
  res.samples = SampleSet{"max_ratio", summaries, cfg.run.T};
}

inline void run_boundary(const ExperimentConfig& cfg, Json& opts, Collector& col,
                         ExperimentResult&) {
  OptionReader o(cfg.options, opts);
  BoundaryRule rule;
  rule.growth = o.positive("growth", rule.growth);
  rule.min_rate = o.positive("min_rate", rule.min_rate);
  rule.cauchy_tol = o.positive("cauchy_tol", rule.cauchy_tol);
  const double min_correct = o.positive("min_correct", 0.99);
  const auto decimate = o.count("decimate", 10);
  reject_unknown_options(cfg.options, opts);
  SimConfig sc = sim_config(cfg);
  sc.decimate = static_cast<std::size_t>(std::max<std::uint64_t>(1, decimate));
  const auto labels = parallel_map(cfg.run.N, cfg.run.workers, [&](std::size_t i) {
    return boundary_classify(simulate(sc, i), cfg.params, rule);
  });
  Json counts = Json::object();
  for (auto b : {BoundaryPiece::varpi_p_times_R, BoundaryPiece::R_times_varpi_q,
                 BoundaryPiece::varpi_pq, BoundaryPiece::undecided})
    counts[to_string(b)] = std::count(labels.begin(), labels.end(), b);
  col.details["labels"] = counts;
  const double n = static_cast<double>(labels.size());
  if (cfg.params.a != 0.0) {
    const auto expected =
        cfg.params.a > 0.0 ? BoundaryPiece::varpi_p_times_R : BoundaryPiece::R_times_varpi_q;
    const double wrong = n - static_cast<double>(std::count(labels.begin(), labels.end(), expected));
    col.add("boundary_misclassified_fraction", wrong / n, 1.0 - min_correct, labels.size());
  } else {
    const double drifted = static_cast<double>(
        std::count(labels.begin(), labels.end(), BoundaryPiece::varpi_p_times_R) +
        std::count(labels.begin(), labels.end(), BoundaryPiece::R_times_varpi_q));
    col.add("boundary_drifted_fraction", drifted / n, 0.0, labels.size());
  }
}

inline GridSpec grid_from_options(const JsonReader& opt, Json& resolved) {
  GridSpec g;
  if (opt.has("grid")) {
    const auto r = opt.object("grid");
    r.only({"center", "half", "n", "eps"});
    if (r.has("center")) {
      const auto& c = r.raw("center");
      if (!c.is_array() || c.size() != 3 || !c[0].is_number() || !c[1].is_number() || !c[2].is_number())
        throw SchemaError(r.path("center"), "expected [x, y, z]");
      g.center = {c[0].get<double>(), c[1].get<double>(), c[2].get<double>()};
    }
    g.half_x = g.half_y = g.half_z = r.positive("half", 1.0);
    g.nx = g.ny = g.nz = static_cast<int>(r.count("n", 5));
    g.eps = r.positive("eps", 1e-3);
  }
  if (g.nx < 3) throw SchemaError("options.grid.n", "must be at least 3");
  resolved["grid"] = {{"center", {g.center.x, g.center.y, g.center.z}},
                      {"half", g.half_x},
                      {"n", g.nx},
                      {"eps", g.eps}};
  return g;
}

inline void run_harmonic(const ExperimentConfig& cfg, Json& opts, Collector& col,
                         ExperimentResult&) {
  OptionReader o(cfg.options, opts);
  const double tol = o.positive("tolerance", 1e-5);
  const bool richardson = o.boolean("richardson", true);
  const auto& opt = o.reader();
  const GridSpec grid = grid_from_options(opt, opts);
  if (!opt.has("kernels") || !opt.raw("kernels").is_array() || opt.raw("kernels").empty())
    throw SchemaError("options.kernels", "expected a non-empty array");
  MeasureSpec nu1, nu2;
  std::optional<double> lambda;
  Json kernels = Json::array();
  const auto& ks = opt.raw("kernels");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const std::string path = "options.kernels[" + std::to_string(i) + "]";
    const auto pm = plane_measure_from_json(ks[i], path);
    const bool first = pm.kernel.plane == Plane::first;
    const double want_k = first ? cfg.params.p : cfg.params.q;
    const double want_b = first ? cfg.params.a : -cfg.params.a;
    if (std::fabs(pm.kernel.curvature - want_k) > 1e-12)
      throw SchemaError(path + ".curvature", first ? "must equal params.p" : "must equal params.q");
    if (std::fabs(pm.kernel.drift - want_b) > 1e-12)
      throw SchemaError(path + ".drift", first ? "must equal params.a" : "must equal -params.a");
    if (lambda && *lambda != pm.kernel.lambda)
      throw SchemaError(path + ".lambda", "all kernels must share one lambda");
    lambda = pm.kernel.lambda;
    auto& nu = first ? nu1 : nu2;
    nu.atoms.insert(nu.atoms.end(), pm.measure.atoms.begin(), pm.measure.atoms.end());
    kernels.push_back(to_json(pm));
  }
  opts["kernels"] = kernels;
  reject_unknown_options(cfg.options, opts);
  const double r = eigen_residual(nu1, nu2, cfg.params, *lambda, grid, richardson, cfg.run.workers);
  col.details["lambda"] = *lambda;
  col.details["lambda_min"] = lambda_min(cfg.params.a);
  col.add("eigen_residual", r, tol, grid.size());
}

inline void run_geometry(const ExperimentConfig& cfg, Json& opts, Collector& col,
                         ExperimentResult& res) {
  OptionReader o(cfg.options, opts);
  const auto segments = o.count("segments", 512);
  const auto iters = o.count("iters", 2);
  const double slack = o.positive("slack", 1e-3);
  const auto random_count = o.count("random", 0);
  const auto& opt = o.reader();
  std::vector<SolPoint> pts;
  if (opt.has("points")) {
    const auto& arr = opt.raw("points");
    if (!arr.is_array()) throw SchemaError("options.points", "expected an array of [x, y, z]");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto& p = arr[i];
      if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number())
        throw SchemaError("options.points[" + std::to_string(i) + "]", "expected [x, y, z]");
      pts.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
    opts["points"] = arr;
  }
  reject_unknown_options(cfg.options, opts);
  // Random points: magnitudes log-uniform on [1e-2, 1e2], random signs, |z| <= 10.
  std::mt19937_64 rng(cfg.run.seed);
  std::uniform_real_distribution<double> mag(std::log(1e-2), std::log(1e2)), zed(-10.0, 10.0);
  std::bernoulli_distribution sign(0.5);
  for (std::uint64_t i = 0; i < random_count; ++i) {
    const double x = std::exp(mag(rng)) * (sign(rng) ? 1 : -1);
    const double y = std::exp(mag(rng)) * (sign(rng) ? 1 : -1);
    pts.push_back({x, y, zed(rng)});
  }
  if (pts.empty()) throw SchemaError("options.points", "give points or a positive random count");
  if (segments < 2) throw SchemaError("options.segments", "must be at least 2");
  struct Row {
    double lo, est, hi;
  };
  const auto rows = parallel_map(pts.size(), cfg.run.workers, [&](std::size_t i) {
    const SolPoint& g = pts[i];
    const double est = estimate_distance(g, cfg.params, static_cast<int>(segments), static_cast<int>(iters));
    double lo = lower_bound_i(g);
    double hi = upper_bound_iii(g, cfg.params);
    if (g.x != 0.0 && g.y != 0.0) {
      lo = std::max(lo, lower_bound_ii(g, cfg.params));
      hi = std::min(hi, upper_bound_iv(g, cfg.params));
    }
    return Row{lo, est, hi};
  });
  std::size_t bad = 0;
  SampleSet est{"estimate_distance", {}, 0.0};
  Json table = Json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bad += !(rows[i].lo <= rows[i].est && rows[i].est <= rows[i].hi + slack);
    est.values.push_back(rows[i].est);
    if (i < 100)
      table.push_back({{"point", {pts[i].x, pts[i].y, pts[i].z}},
                       {"lower", rows[i].lo},
                       {"estimate", rows[i].est},
                       {"upper", rows[i].hi}});
  }
  col.details["points"] = table;
  col.add("sandwich_violations", static_cast<double>(bad), 0.0, rows.size());
  res.samples = std::move(est);
}

}  // namespace detail

/// Runs one experiment. The report body depends only on the configuration
/// (not on the worker count); timing and workers go under "execution".
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult res;
  detail::Collector col;
  col.echo = {cfg.params, cfg.run.dt, cfg.run.T, cfg.run.N, cfg.run.seed};
  Json opts = Json::object();
  switch (cfg.command) {
    case Command::simulate: detail::run_simulate(cfg, opts, col, res); break;
    case Command::clt: detail::run_clt(cfg, opts, col, res); break;
    case Command::escape: detail::run_escape(cfg, opts, col, res); break;
    case Command::tails: detail::run_tails(cfg, opts, col, res); break;
    case Command::deviation: detail::run_deviation(cfg, opts, col, res); break;
    case Command::boundary: detail::run_boundary(cfg, opts, col, res); break;
    case Command::harmonic: detail::run_harmonic(cfg, opts, col, res); break;
    case Command::geometry: detail::run_geometry(cfg, opts, col, res); break;
  }
  Json reports = Json::array();
  bool pass = true;
  for (const auto& r : col.reports) {
    reports.push_back(to_json(r, col.echo));
    pass = pass && r.pass;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  res.report = Json{{"version", kVersion},
                    {"command", to_string(cfg.command)},
                    {"config",
                     {{"params", {{"p", cfg.params.p}, {"q", cfg.params.q}, {"a", cfg.params.a}}},
                      {"run",
                       {{"dt", cfg.run.dt},
                        {"T", cfg.run.T},
                        {"N", cfg.run.N},
                        {"seed", cfg.run.seed},
                        {"scheme", to_string(cfg.run.scheme)}}},
                      {"options", opts}}},
                    {"reports", reports},
                    {"details", col.details},
                    {"pass", pass},
                    {"execution", {{"workers", cfg.run.workers}, {"seconds", seconds}}}};
  return res;
}

/// Writes report.json and, when present, samples.csv and path.csv.
inline void write_artifacts(const ExperimentResult& res, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / "report.json").string());
    out << res.report.dump(2) << '\n';
  }
  if (res.samples) write_samples_csv(dir / "samples.csv", *res.samples);
  if (res.path) write_path_csv(dir / "path.csv", *res.path);
}

}  // namespace solgeo

#endif  // SOLGEO_EXPERIMENT_HPP
