#pragma once

// Experiment runner: sweeps one parameter of a synthetic configuration, runs
// the planners and ADPaR variants on seeded trials and tabulates per-point
// mean / standard error as CSV.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stratrec/adpar.hpp"
#include "stratrec/batchstrat.hpp"
#include "stratrec/errors.hpp"
#include "stratrec/random.hpp"
#include "stratrec/stats.hpp"
#include "stratrec/synthgen.hpp"
#include "stratrec/text_io.hpp"
#include "stratrec/workforce.hpp"

namespace stratrec::harness {

enum class ExperimentKind { SatisfiedPct, Throughput, Payoff, AdparQuality, ScalingBatch, ScalingAdpar };
enum class SweepParam { K, M, S, W };

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::SatisfiedPct;
  SweepParam param = SweepParam::W;
  std::vector<double> values{0.2, 0.4, 0.6, 0.8, 1.0};
  GenConfig base;
  AggregateMode aggregate = AggregateMode::Sum;
  SolveMode solve = SolveMode::MaxOfThree;
  // Same trial seeds at every sweep point (common random numbers).
  bool paired = false;
  std::size_t plan_cap = kDefaultBruteForceCap;
  std::uint64_t subset_cap = kDefaultSubsetCap;
  int timing_reps = 5;
  std::string output;
};

inline const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::SatisfiedPct: return "satisfied_pct";
    case ExperimentKind::Throughput: return "throughput";
    case ExperimentKind::Payoff: return "payoff";
    case ExperimentKind::AdparQuality: return "adpar_quality";
    case ExperimentKind::ScalingBatch: return "scaling_batch";
    case ExperimentKind::ScalingAdpar: return "scaling_adpar";
  }
  return "?";
}

inline const char* param_name(SweepParam p) {
  switch (p) {
    case SweepParam::K: return "k";
    case SweepParam::M: return "m";
    case SweepParam::S: return "S";
    case SweepParam::W: return "W";
  }
  return "?";
}

inline ExperimentKind parse_kind(const std::string& s) {
  for (auto k : {ExperimentKind::SatisfiedPct, ExperimentKind::Throughput, ExperimentKind::Payoff,
                 ExperimentKind::AdparQuality, ExperimentKind::ScalingBatch, ExperimentKind::ScalingAdpar}) {
    if (s == kind_name(k)) return k;
  }
  throw ValidationError("unknown experiment kind '" + s + "'");
}

inline SweepParam parse_param(const std::string& s) {
  if (s == "k") return SweepParam::K;
  if (s == "m") return SweepParam::M;
  if (s == "S" || s == "s" || s == "strategies") return SweepParam::S;
  if (s == "W" || s == "w" || s == "availability") return SweepParam::W;
  throw ValidationError("unknown sweep parameter '" + s + "' (expected k|m|S|W)");
}

inline StrategyDist parse_dist(const std::string& s) {
  if (s == "uniform") return StrategyDist::Uniform;
  if (s == "normal") return StrategyDist::Normal;
  throw ValidationError("unknown distribution '" + s + "' (expected uniform|normal)");
}

inline AggregateMode parse_mode(const std::string& s) {
  if (s == "sum") return AggregateMode::Sum;
  if (s == "max") return AggregateMode::Max;
  throw ValidationError("unknown aggregation mode '" + s + "' (expected sum|max)");
}

inline Objective parse_objective(const std::string& s) {
  if (s == "throughput") return Objective::Throughput;
  if (s == "payoff") return Objective::Payoff;
  throw ValidationError("unknown objective '" + s + "' (expected throughput|payoff)");
}

inline SolveMode parse_solve(const std::string& s) {
  if (s == "max-of-three") return SolveMode::MaxOfThree;
  if (s == "strict") return SolveMode::FeasibilityStrict;
  throw ValidationError("unknown solve mode '" + s + "' (expected max-of-three|strict)");
}

inline LatencySign parse_latency(const std::string& s) {
  if (s == "physical") return LatencySign::Physical;
  if (s == "positive") return LatencySign::Positive;
  throw ValidationError("unknown latency sign '" + s + "' (expected physical|positive)");
}

namespace detail {

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw ValidationError(key + ": bad integer '" + v + "'");
  return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw ValidationError(key + ": bad number '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ValidationError(key + ": bad boolean '" + v + "'");
}

}  // namespace detail

/// Applies one key=value setting to `spec`.
inline void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  using detail::parse_real;
  using detail::parse_u64;
  if (key == "kind") spec.kind = parse_kind(value);
  else if (key == "param") spec.param = parse_param(value);
  else if (key == "values") {
    spec.values.clear();
    for (const auto& f : io::split(value, ',')) spec.values.push_back(parse_real(key, f));
  }
  else if (key == "seed") spec.base.seed = parse_u64(key, value);
  else if (key == "strategies") spec.base.strategy_count = parse_u64(key, value);
  else if (key == "batch") spec.base.batch_size = parse_u64(key, value);
  else if (key == "k") spec.base.k = static_cast<int>(parse_u64(key, value));
  else if (key == "availability") spec.base.availability = parse_real(key, value);
  else if (key == "dist") spec.base.strategy_dist = parse_dist(value);
  else if (key == "trials") spec.base.trials = static_cast<int>(parse_u64(key, value));
  else if (key == "latency") spec.base.latency_sign = parse_latency(value);
  else if (key == "mode") spec.aggregate = parse_mode(value);
  else if (key == "solve") spec.solve = parse_solve(value);
  else if (key == "paired") spec.paired = detail::parse_bool(key, value);
  else if (key == "plan_cap") spec.plan_cap = parse_u64(key, value);
  else if (key == "subset_cap") spec.subset_cap = parse_u64(key, value);
  else if (key == "timing_reps") spec.timing_reps = static_cast<int>(parse_u64(key, value));
  else if (key == "output") spec.output = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

/// Reads `key = value` lines; '#' starts a comment.
inline void read_config(std::istream& in, ExperimentSpec& spec) {
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(no) + ": expected key=value");
    apply_setting(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

/// Configuration for one sweep point.
inline GenConfig at_point(const ExperimentSpec& spec, double value) {
  GenConfig cfg = spec.base;
  auto as_count = [&](double v) {
    if (!(v >= 1.0) || v != std::floor(v)) {
      throw ValidationError(std::string("sweep value for ") + param_name(spec.param) +
                            " must be a positive integer");
    }
    return static_cast<std::size_t>(v);
  };
  switch (spec.param) {
    case SweepParam::K: cfg.k = static_cast<int>(as_count(value)); break;
    case SweepParam::M: cfg.batch_size = as_count(value); break;
    case SweepParam::S: cfg.strategy_count = as_count(value); break;
    case SweepParam::W: cfg.availability = value; break;
  }
  cfg.validate();
  return cfg;
}

inline std::uint64_t trial_seed(const ExperimentSpec& spec, std::size_t point, std::size_t trial) {
  return spec.paired ? derive_seed(spec.base.seed, {trial}) : derive_seed(spec.base.seed, {point, trial});
}

/// Metric columns per experiment kind. Names ending in "_ms" are wall-clock timings.
inline std::vector<std::string> metric_names(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::SatisfiedPct: return {"satisfied_pct"};
    case ExperimentKind::Throughput:
    case ExperimentKind::Payoff:
      return {"greedy", "baseline_g", "brute", "approx_greedy", "approx_baseline_g", "satisfied_pct"};
    case ExperimentKind::AdparQuality: return {"exact", "brute", "one_dim", "one_dim_failure_pct", "mbb"};
    case ExperimentKind::ScalingBatch: return {"greedy_ms", "brute_ms"};
    case ExperimentKind::ScalingAdpar: return {"exact_ms", "brute_ms", "one_dim_ms", "mbb_ms"};
  }
  return {};
}

struct TrialResult {
  std::vector<std::optional<double>> values;  // aligned with metric_names(kind)
  std::string warning;
};

namespace detail {

template <typename Fn>
double median_ms(int reps, Fn&& fn) {
  using clock = std::chrono::steady_clock;
  fn();  // warm-up, discarded
  std::vector<double> times;
  for (int r = 0; r < std::max(reps, 1); ++r) {
    const auto t0 = clock::now();
    fn();
    times.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count());
  }
  return stats::median(std::move(times));
}

inline std::optional<double> ratio(double num, double den) {
  if (den <= 0.0) return std::nullopt;
  return num / den;
}

}  // namespace detail

/// Runs one trial of `kind` on the instance generated from `cfg` (seed included).
inline TrialResult trial_metrics(const ExperimentSpec& spec, const GenConfig& cfg) {
  const Instance inst = gen_instance(cfg);
  const double W = cfg.availability;
  TrialResult out;

  switch (spec.kind) {
    case ExperimentKind::SatisfiedPct: {
      const BatchOptions opts{Objective::Throughput, spec.aggregate, spec.solve};
      const BatchPlan plan = batch_strat(inst.batch, inst.catalog, inst.models, W, opts);
      out.values = {100.0 * static_cast<double>(plan.selected.size()) / static_cast<double>(inst.batch.size())};
      return out;
    }
    case ExperimentKind::Throughput:
    case ExperimentKind::Payoff: {
      const Objective obj = spec.kind == ExperimentKind::Throughput ? Objective::Throughput : Objective::Payoff;
      const auto matrix = build_matrix(inst.batch, inst.catalog, inst.models, spec.solve);
      const auto vec = aggregate_rows(matrix, inst.batch, spec.aggregate);
      const BatchPlan greedy = obj == Objective::Throughput ? plan_throughput(inst.batch, vec, W)
                                                            : plan_payoff(inst.batch, vec, W);
      const BatchPlan base = plan_ratio_greedy(inst.batch, vec, W, obj);
      std::optional<double> brute;
      if (inst.batch.size() <= spec.plan_cap) {
        brute = brute_force_plan(inst.batch, vec, W, obj, spec.plan_cap).objective;
      } else {
        out.warning = "brute force skipped: m exceeds cap " + std::to_string(spec.plan_cap);
      }
      const double m = static_cast<double>(inst.batch.size());
      out.values = {greedy.objective,
                    base.objective,
                    brute,
                    brute ? detail::ratio(greedy.objective, *brute) : std::nullopt,
                    brute ? detail::ratio(base.objective, *brute) : std::nullopt,
                    100.0 * static_cast<double>(greedy.selected.size()) / m};
      return out;
    }
    case ExperimentKind::AdparQuality: {
      double exact = 0.0;
      double brute = 0.0;
      double one_dim = 0.0;
      double mbb = 0.0;
      std::size_t one_dim_ok = 0;
      const bool brute_ok = binomial(inst.catalog.size(), static_cast<std::uint64_t>(cfg.k)) <= spec.subset_cap;
      if (!brute_ok) out.warning = "brute force skipped: subsets exceed cap " + std::to_string(spec.subset_cap);
      for (const auto& d : inst.batch) {
        exact += adpar_exact(inst.catalog, d, d.k).distance;
        if (brute_ok) brute += adpar_brute(inst.catalog, d, d.k, spec.subset_cap).distance;
        if (auto r = baseline_one_dim(inst.catalog, d, d.k)) {
          one_dim += r->distance;
          ++one_dim_ok;
        }
        mbb += baseline_mbb(inst.catalog, d, d.k, cfg.seed).distance;
      }
      const double m = static_cast<double>(inst.batch.size());
      out.values = {exact / m,
                    brute_ok ? std::optional<double>(brute / m) : std::nullopt,
                    one_dim_ok ? std::optional<double>(one_dim / static_cast<double>(one_dim_ok)) : std::nullopt,
                    100.0 * (1.0 - static_cast<double>(one_dim_ok) / m),
                    mbb / m};
      return out;
    }
    case ExperimentKind::ScalingBatch: {
      const auto run_greedy = [&] {
        const auto matrix = build_matrix(inst.batch, inst.catalog, inst.models, spec.solve);
        const auto vec = aggregate_rows(matrix, inst.batch, spec.aggregate);
        return plan_throughput(inst.batch, vec, W);
      };
      out.values.push_back(detail::median_ms(spec.timing_reps, run_greedy));
      if (inst.batch.size() <= spec.plan_cap) {
        const auto matrix = build_matrix(inst.batch, inst.catalog, inst.models, spec.solve);
        const auto vec = aggregate_rows(matrix, inst.batch, spec.aggregate);
        out.values.push_back(detail::median_ms(spec.timing_reps, [&] {
          return brute_force_plan(inst.batch, vec, W, Objective::Throughput, spec.plan_cap);
        }));
      } else {
        out.values.push_back(std::nullopt);
        out.warning = "brute force skipped: m exceeds cap " + std::to_string(spec.plan_cap);
      }
      return out;
    }
    case ExperimentKind::ScalingAdpar: {
      auto each = [&](auto&& fn) {
        return [&, fn] {
          for (const auto& d : inst.batch) fn(d);
        };
      };
      out.values.push_back(detail::median_ms(
          spec.timing_reps, each([&](const DeploymentRequest& d) { adpar_exact(inst.catalog, d, d.k); })));
      if (binomial(inst.catalog.size(), static_cast<std::uint64_t>(cfg.k)) <= spec.subset_cap) {
        out.values.push_back(detail::median_ms(spec.timing_reps, each([&](const DeploymentRequest& d) {
          adpar_brute(inst.catalog, d, d.k, spec.subset_cap);
        })));
      } else {
        out.values.push_back(std::nullopt);
        out.warning = "brute force skipped: subsets exceed cap " + std::to_string(spec.subset_cap);
      }
      out.values.push_back(detail::median_ms(
          spec.timing_reps, each([&](const DeploymentRequest& d) { baseline_one_dim(inst.catalog, d, d.k); })));
      out.values.push_back(detail::median_ms(spec.timing_reps, each([&](const DeploymentRequest& d) {
        baseline_mbb(inst.catalog, d, d.k, cfg.seed);
      })));
      return out;
    }
  }
  return out;
}

struct PointSummary {
  double value = 0.0;
  std::vector<std::vector<std::optional<double>>> per_trial;  // [trial][metric]
  std::string warning;
};

/// Runs every sweep point and trial.
inline std::vector<PointSummary> run_points(const ExperimentSpec& spec) {
  if (spec.values.empty()) throw ValidationError("experiment has no sweep values");
  std::vector<PointSummary> out;
  for (std::size_t p = 0; p < spec.values.size(); ++p) {
    PointSummary point;
    point.value = spec.values[p];
    GenConfig cfg = at_point(spec, spec.values[p]);
    for (int t = 0; t < cfg.trials; ++t) {
      cfg.seed = trial_seed(spec, p, static_cast<std::size_t>(t));
      TrialResult r = trial_metrics(spec, cfg);
      if (!r.warning.empty()) point.warning = r.warning;
      point.per_trial.push_back(std::move(r.values));
    }
    out.push_back(std::move(point));
  }
  return out;
}

inline void write_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<PointSummary>& points) {
  const auto names = metric_names(spec.kind);
  out << "param,value";
  for (const auto& n : names) out << ',' << n << "_mean," << n << "_se," << n << "_n";
  out << ",trials,seed,warning\n";
  for (const auto& point : points) {
    out << param_name(spec.param) << ',' << io::format_number(point.value);
    for (std::size_t m = 0; m < names.size(); ++m) {
      std::vector<double> xs;
      for (const auto& trial : point.per_trial) {
        if (trial[m]) xs.push_back(*trial[m]);
      }
      if (xs.empty()) {
        out << ",,,0";
      } else {
        out << ',' << io::format_number(stats::mean(xs)) << ',' << io::format_number(stats::standard_error(xs))
            << ',' << xs.size();
      }
    }
    out << ',' << point.per_trial.size() << ',' << spec.base.seed << ',' << point.warning << '\n';
  }
}

/// Runs the experiment and returns its CSV table.
inline std::string run(const ExperimentSpec& spec) {
  std::ostringstream out;
  write_csv(out, spec, run_points(spec));
  return out.str();
}

}  // namespace stratrec::harness
