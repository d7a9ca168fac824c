// stratrec: command-line front end.
//
//   stratrec gen        --seed --strategies --batch --k --dist --output DIR
//   stratrec plan       --catalog --requests --models --availability --mode --objective [--output]
//   stratrec adpar      --catalog --requests [--algorithm] [--k] [--output]
//   stratrec experiment [--config FILE] [--kind --param --values ...] [--output]
//   stratrec verify     --seed --trials [--output]
//
// Exit codes: 0 success, 1 validation error, 2 infeasibility, 3 size-cap refusal.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stratrec/stratrec.hpp"

namespace fs = std::filesystem;
using namespace stratrec;

namespace {

enum Exit { kOk = 0, kValidation = 1, kInfeasible = 2, kSizeCap = 3 };

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
}

struct GenOpts {
  std::uint64_t seed = 1;
  std::size_t strategies = 10000;
  std::size_t batch = 10;
  int k = 10;
  double availability = 0.5;
  std::string dist = "uniform";
  std::string latency = "physical";
  int trials = 10;
};

void add_gen_flags(CLI::App* cmd, GenOpts& g) {
  cmd->add_option("--seed", g.seed, "Base seed");
  cmd->add_option("--strategies", g.strategies, "Strategy catalog size |S|");
  cmd->add_option("--batch", g.batch, "Requests per batch m");
  cmd->add_option("--k", g.k, "Strategies per request");
  cmd->add_option("--availability", g.availability, "Worker availability W in [0,1]");
  cmd->add_option("--dist", g.dist, "Strategy distribution")->check(CLI::IsMember({"uniform", "normal"}));
  cmd->add_option("--latency", g.latency, "Latency model sign")->check(CLI::IsMember({"physical", "positive"}));
}

GenConfig to_config(const GenOpts& g) {
  GenConfig cfg;
  cfg.seed = g.seed;
  cfg.strategy_count = g.strategies;
  cfg.batch_size = g.batch;
  cfg.k = g.k;
  cfg.availability = g.availability;
  cfg.strategy_dist = harness::parse_dist(g.dist);
  cfg.latency_sign = harness::parse_latency(g.latency);
  cfg.trials = g.trials;
  cfg.validate();
  return cfg;
}

int cmd_gen(const GenOpts& g, const std::string& output) {
  const Instance inst = gen_instance(to_config(g));
  const fs::path dir = output.empty() ? fs::path(".") : fs::path(output);
  fs::create_directories(dir);
  std::ostringstream s, r, m;
  io::write_strategies(s, inst.catalog);
  io::write_requests(r, inst.batch);
  io::write_models(m, inst.models);
  emit((dir / "strategies.csv").string(), s.str());
  emit((dir / "requests.csv").string(), r.str());
  emit((dir / "models.csv").string(), m.str());
  return kOk;
}

struct PlanOpts {
  std::string catalog, requests, models, output, alternatives;
  double availability = 0.5;
  std::string mode = "sum";
  std::string objective = "throughput";
  std::string solve = "max-of-three";
};

int cmd_plan(const PlanOpts& o) {
  const auto catalog = io::load_strategies(o.catalog);
  const auto batch = io::load_requests(o.requests);
  const auto models = io::load_models(o.models);
  BatchOptions opts{harness::parse_objective(o.objective), harness::parse_mode(o.mode),
                    harness::parse_solve(o.solve)};
  const BatchPlan plan = batch_strat(batch, catalog, models, o.availability, opts);
  std::ostringstream out;
  io::write_plan(out, plan);
  emit(o.output, out.str());

  if (!o.alternatives.empty()) {
    std::vector<io::AdparRecord> rows;
    for (const auto& d : batch) {
      if (std::find(plan.unsatisfied.begin(), plan.unsatisfied.end(), d.id) == plan.unsatisfied.end()) continue;
      rows.push_back({d, adpar_exact(catalog, d, d.k)});
    }
    std::ostringstream alt;
    io::write_adpar(alt, rows);
    emit(o.alternatives, alt.str());
  }
  return kOk;
}

struct AdparOpts {
  std::string catalog, requests, output;
  std::string algorithm = "exact";
  std::optional<int> k;
  std::uint64_t seed = 1;
};

int cmd_adpar(const AdparOpts& o) {
  const auto catalog = io::load_strategies(o.catalog);
  auto batch = io::load_requests(o.requests);
  std::vector<io::AdparRecord> rows;
  for (auto& d : batch) {
    if (o.k) d.k = *o.k;
    io::AdparRecord rec{d, std::nullopt};
    if (o.algorithm == "exact") rec.result = adpar_exact(catalog, d, d.k);
    else if (o.algorithm == "brute") rec.result = adpar_brute(catalog, d, d.k);
    else if (o.algorithm == "one_dim") rec.result = baseline_one_dim(catalog, d, d.k);
    else rec.result = baseline_mbb(catalog, d, d.k, o.seed);
    rows.push_back(std::move(rec));
  }
  std::ostringstream out;
  io::write_adpar(out, rows);
  emit(o.output, out.str());
  return kOk;
}

/// Oracle-equivalence checks on seeded random instances.
int cmd_verify(std::uint64_t seed, int trials, std::size_t strategies, std::size_t batch, int k,
               const std::string& output) {
  std::ostringstream out;
  std::size_t failures = 0;
  auto report = [&](const std::string& name, std::size_t bad, std::size_t total) {
    out << name << ',' << (bad == 0 ? "pass" : "fail") << ',' << (total - bad) << '/' << total << '\n';
    failures += bad;
  };

  std::size_t thr_bad = 0, pay_bad = 0, adp_bad = 0;
  std::size_t adp_total = 0;
  for (int t = 0; t < trials; ++t) {
    GenConfig cfg;
    cfg.seed = derive_seed(seed, {static_cast<std::uint64_t>(t)});
    cfg.strategy_count = strategies;
    cfg.batch_size = batch;
    cfg.k = k;
    cfg.availability = 0.25 * static_cast<double>(1 + t % 3);
    const Instance inst = gen_instance(cfg);
    const auto matrix = build_matrix(inst.batch, inst.catalog, inst.models);
    const auto vec = aggregate_rows(matrix, inst.batch, AggregateMode::Max);
    const double W = cfg.availability;

    const double thr = plan_throughput(inst.batch, vec, W).objective;
    if (thr != brute_force_plan(inst.batch, vec, W, Objective::Throughput).objective) ++thr_bad;
    const double pay = plan_payoff(inst.batch, vec, W).objective;
    if (pay < 0.5 * brute_force_plan(inst.batch, vec, W, Objective::Payoff).objective) ++pay_bad;

    for (const auto& d : inst.batch) {
      ++adp_total;
      const double exact = adpar_exact(inst.catalog, d, d.k).distance;
      const double brute = adpar_brute(inst.catalog, d, d.k).distance;
      if (std::abs(exact - brute) > 1e-9) ++adp_bad;
    }
  }
  out << "check,status,passed\n";
  report("throughput_equals_brute", thr_bad, static_cast<std::size_t>(trials));
  report("payoff_half_bound", pay_bad, static_cast<std::size_t>(trials));
  report("adpar_exact_equals_brute", adp_bad, adp_total);
  emit(output, out.str());
  return failures == 0 ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strategy recommendation: batch planning and alternative parameters"};
  app.require_subcommand(1);

  GenOpts gen;
  std::string gen_out = ".";
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic catalog, models and request batch");
  add_gen_flags(gen_cmd, gen);
  gen_cmd->add_option("--output", gen_out, "Output directory");

  PlanOpts plan;
  auto* plan_cmd = app.add_subcommand("plan", "Plan a request batch under a workforce budget");
  plan_cmd->add_option("--catalog", plan.catalog, "Strategy file")->required();
  plan_cmd->add_option("--requests", plan.requests, "Request file")->required();
  plan_cmd->add_option("--models", plan.models, "Model file")->required();
  plan_cmd->add_option("--availability", plan.availability, "Worker availability W");
  plan_cmd->add_option("--mode", plan.mode)->check(CLI::IsMember({"sum", "max"}));
  plan_cmd->add_option("--objective", plan.objective)->check(CLI::IsMember({"throughput", "payoff"}));
  plan_cmd->add_option("--solve", plan.solve)->check(CLI::IsMember({"max-of-three", "strict"}));
  plan_cmd->add_option("--output", plan.output, "Plan report (stdout if omitted)");
  plan_cmd->add_option("--alternatives", plan.alternatives, "Also write ADPaR results for unsatisfied requests");

  AdparOpts adp;
  auto* adpar_cmd = app.add_subcommand("adpar", "Recommend alternative parameters for requests");
  adpar_cmd->add_option("--catalog", adp.catalog, "Strategy file")->required();
  adpar_cmd->add_option("--requests", adp.requests, "Request file")->required();
  adpar_cmd->add_option("--algorithm", adp.algorithm)
      ->check(CLI::IsMember({"exact", "brute", "one_dim", "mbb"}));
  adpar_cmd->add_option("--k", adp.k, "Override every request's k");
  adpar_cmd->add_option("--seed", adp.seed, "Seed for the mbb baseline's sampling");
  adpar_cmd->add_option("--output", adp.output, "Result file (stdout if omitted)");

  GenOpts exp_gen;
  std::string config, kind, param, values, mode, solve, exp_out;
  bool paired = false;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a parameter sweep and write a CSV table");
  exp_cmd->add_option("--config", config, "key=value file; flags override it");
  exp_cmd->add_option("--kind", kind, "satisfied_pct|throughput|payoff|adpar_quality|scaling_batch|scaling_adpar");
  exp_cmd->add_option("--param", param, "Swept parameter k|m|S|W");
  exp_cmd->add_option("--values", values, "Comma-separated sweep values");
  add_gen_flags(exp_cmd, exp_gen);
  exp_cmd->add_option("--trials", exp_gen.trials, "Trials per sweep point");
  exp_cmd->add_option("--mode", mode)->check(CLI::IsMember({"sum", "max"}));
  exp_cmd->add_option("--objective", kind, "Shorthand for --kind throughput|payoff")
      ->check(CLI::IsMember({"throughput", "payoff"}));
  exp_cmd->add_option("--solve", solve)->check(CLI::IsMember({"max-of-three", "strict"}));
  exp_cmd->add_flag("--paired", paired, "Reuse trial seeds across sweep points");
  exp_cmd->add_option("--output", exp_out, "CSV file (stdout if omitted)");

  std::uint64_t verify_seed = 1;
  int verify_trials = 100;
  std::size_t verify_strategies = 20;
  std::size_t verify_batch = 10;
  int verify_k = 5;
  std::string verify_out;
  auto* verify_cmd = app.add_subcommand("verify", "Check the planners and ADPaR against exhaustive oracles");
  verify_cmd->add_option("--seed", verify_seed);
  verify_cmd->add_option("--trials", verify_trials);
  verify_cmd->add_option("--strategies", verify_strategies);
  verify_cmd->add_option("--batch", verify_batch);
  verify_cmd->add_option("--k", verify_k);
  verify_cmd->add_option("--output", verify_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, gen_out);
    if (*plan_cmd) return cmd_plan(plan);
    if (*adpar_cmd) return cmd_adpar(adp);
    if (*verify_cmd) {
      return cmd_verify(verify_seed, verify_trials, verify_strategies, verify_batch, verify_k, verify_out);
    }

    harness::ExperimentSpec spec;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw ValidationError("cannot open '" + config + "'");
      harness::read_config(in, spec);
    }
    auto given = [&](const char* flag) { return exp_cmd->count(flag) > 0; };
    if (!kind.empty()) spec.kind = harness::parse_kind(kind);
    if (!param.empty()) spec.param = harness::parse_param(param);
    if (!values.empty()) harness::apply_setting(spec, "values", values);
    if (given("--seed")) spec.base.seed = exp_gen.seed;
    if (given("--strategies")) spec.base.strategy_count = exp_gen.strategies;
    if (given("--batch")) spec.base.batch_size = exp_gen.batch;
    if (given("--k")) spec.base.k = exp_gen.k;
    if (given("--availability")) spec.base.availability = exp_gen.availability;
    if (given("--dist")) spec.base.strategy_dist = harness::parse_dist(exp_gen.dist);
    if (given("--latency")) spec.base.latency_sign = harness::parse_latency(exp_gen.latency);
    if (given("--trials")) spec.base.trials = exp_gen.trials;
    if (!mode.empty()) spec.aggregate = harness::parse_mode(mode);
    if (!solve.empty()) spec.solve = harness::parse_solve(solve);
    if (paired) spec.paired = true;
    if (!exp_out.empty()) spec.output = exp_out;
    emit(spec.output, harness::run(spec));
    return kOk;
  } catch (const CardinalityError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const SizeCapError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kSizeCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
}
