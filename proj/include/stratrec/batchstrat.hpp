#pragma once

// Batch deployment planning: distribute an available workforce W over a batch
// of requests, each needing k strategies.
//
// Throughput (count of served requests) is solved exactly by admitting
// requests in ascending requirement. Pay-off is a 0/1 knapsack; the planner
// runs the ratio greedy with the better-of-prefix-or-single rule, which is a
// 1/2-approximation. brute_force_plan enumerates all subsets as an oracle.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stratrec/errors.hpp"
#include "stratrec/model.hpp"
#include "stratrec/workforce.hpp"

namespace stratrec {

enum class Objective { Throughput, Payoff };

/// Slack allowed when comparing accumulated workforce against W.
inline constexpr double kBudgetSlack = 1e-12;

struct BatchPlan {
  std::vector<std::string> selected;                  // admission order
  std::vector<double> requirements;                   // aggregate requirement per selected
  std::vector<std::vector<std::string>> recommendations;  // k strategy ids per selected
  std::vector<std::string> unsatisfied;               // batch order; candidates for ADPaR
  double objective = 0.0;
  double workforce_used = 0.0;
};

/// The k strategies with the smallest requirement, ties by ascending strategy id,
/// or nullopt if fewer than k are feasible.
inline std::optional<std::vector<std::string>> recommend_strategies(
    std::span<const Requirement> row, int k, std::span<const std::string> strategy_ids) {
  if (k < 1) throw ValidationError("recommend_strategies: k must be >= 1");
  if (row.size() != strategy_ids.size()) {
    throw ValidationError("recommend_strategies: row and id list differ in length");
  }
  const auto picked = k_smallest(row, static_cast<std::size_t>(k), [&](std::size_t a, std::size_t b) {
    return strategy_ids[a] < strategy_ids[b];
  });
  if (picked.size() < static_cast<std::size_t>(k)) return std::nullopt;
  std::vector<std::string> ids;
  ids.reserve(picked.size());
  for (std::size_t j : picked) ids.push_back(strategy_ids[j]);
  return ids;
}

namespace detail {

inline double objective_value(const DeploymentRequest& d, Objective obj) {
  return obj == Objective::Throughput ? 1.0 : d.effective_payoff();
}

inline void check_inputs(std::span<const DeploymentRequest> batch, const RequirementVector& vec,
                         double W) {
  if (vec.values.size() != batch.size()) {
    throw ValidationError("requirement vector is not aligned with the batch");
  }
  if (!(W >= 0.0 && W <= 1.0)) throw ValidationError("availability W must lie in [0,1]");
}

inline bool fits(double used, double w, double W) { return used + w <= W + kBudgetSlack; }

inline void fill_unsatisfied(std::span<const DeploymentRequest> batch, BatchPlan& plan) {
  std::vector<std::string> chosen = plan.selected;
  std::sort(chosen.begin(), chosen.end());
  for (const auto& d : batch) {
    if (!std::binary_search(chosen.begin(), chosen.end(), d.id)) plan.unsatisfied.push_back(d.id);
  }
}

inline void admit(BatchPlan& plan, const DeploymentRequest& d, double w, Objective obj) {
  plan.selected.push_back(d.id);
  plan.requirements.push_back(w);
  plan.objective += objective_value(d, obj);
  plan.workforce_used += w;
}

}  // namespace detail

/// Exact throughput plan: ascending requirement (ties by request id) until W is spent.
inline BatchPlan plan_throughput(std::span<const DeploymentRequest> batch,
                                 const RequirementVector& vec, double W) {
  detail::check_inputs(batch, vec, W);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (vec.values[i].feasible()) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (vec.values[a] != vec.values[b]) return vec.values[a] < vec.values[b];
    return batch[a].id < batch[b].id;
  });

  BatchPlan plan;
  for (std::size_t i : order) {
    const double w = vec.values[i].value();
    if (!detail::fits(plan.workforce_used, w, W)) break;
    detail::admit(plan, batch[i], w, Objective::Throughput);
  }
  detail::fill_unsatisfied(batch, plan);
  return plan;
}

namespace detail {

/// Feasible requests that fit W on their own, in non-increasing payoff/requirement
/// order (ties by id). Zero-requirement requests are returned separately.
inline void ratio_order(std::span<const DeploymentRequest> batch, const RequirementVector& vec,
                        double W, std::vector<std::size_t>& free, std::vector<std::size_t>& order) {
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Requirement r = vec.values[i];
    if (!r.feasible() || !fits(0.0, r.value(), W)) continue;
    (r.value() == 0.0 ? free : order).push_back(i);
  }
  std::sort(free.begin(), free.end(), [&](auto a, auto b) { return batch[a].id < batch[b].id; });
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ra = batch[a].effective_payoff() / vec.values[a].value();
    const double rb = batch[b].effective_payoff() / vec.values[b].value();
    if (ra != rb) return ra > rb;
    return batch[a].id < batch[b].id;
  });
}

}  // namespace detail

/// Pay-off plan: ratio greedy; at the first request that no longer fits, keep the
/// better of the accumulated prefix and that request alone, then keep adding any
/// remaining request that still fits.
inline BatchPlan plan_payoff(std::span<const DeploymentRequest> batch, const RequirementVector& vec,
                             double W) {
  detail::check_inputs(batch, vec, W);
  std::vector<std::size_t> free;
  std::vector<std::size_t> order;
  detail::ratio_order(batch, vec, W, free, order);

  std::vector<bool> taken(batch.size(), false);
  std::vector<std::size_t> prefix;
  double used = 0.0;
  double prefix_payoff = 0.0;
  std::optional<std::size_t> blocker;
  for (std::size_t i : order) {
    const double w = vec.values[i].value();
    if (!detail::fits(used, w, W)) {
      blocker = i;
      break;
    }
    prefix.push_back(i);
    used += w;
    prefix_payoff += batch[i].effective_payoff();
  }

  std::vector<std::size_t> chosen;
  if (blocker && batch[*blocker].effective_payoff() > prefix_payoff) {
    chosen = {*blocker};
    used = vec.values[*blocker].value();
  } else {
    chosen = prefix;
  }
  for (std::size_t i : chosen) taken[i] = true;
  if (blocker) {
    for (std::size_t i : order) {
      if (taken[i]) continue;
      const double w = vec.values[i].value();
      if (detail::fits(used, w, W)) {
        chosen.push_back(i);
        taken[i] = true;
        used += w;
      }
    }
  }

  BatchPlan plan;
  for (std::size_t i : free) detail::admit(plan, batch[i], 0.0, Objective::Payoff);
  for (std::size_t i : chosen) detail::admit(plan, batch[i], vec.values[i].value(), Objective::Payoff);
  detail::fill_unsatisfied(batch, plan);
  return plan;
}

/// Plain ratio greedy without the better-of rule: stops at the first request that
/// does not fit. Used as a comparison baseline.
inline BatchPlan plan_ratio_greedy(std::span<const DeploymentRequest> batch,
                                   const RequirementVector& vec, double W, Objective obj) {
  detail::check_inputs(batch, vec, W);
  std::vector<std::size_t> free;
  std::vector<std::size_t> order;
  if (obj == Objective::Throughput) {
    // Unit value: ratio order reduces to ascending requirement.
    RequirementVector unit = vec;
    std::vector<DeploymentRequest> unit_batch(batch.begin(), batch.end());
    for (auto& d : unit_batch) d.payoff = 1.0;
    detail::ratio_order(unit_batch, unit, W, free, order);
  } else {
    detail::ratio_order(batch, vec, W, free, order);
  }
  BatchPlan plan;
  for (std::size_t i : free) detail::admit(plan, batch[i], 0.0, obj);
  for (std::size_t i : order) {
    const double w = vec.values[i].value();
    if (!detail::fits(plan.workforce_used, w, W)) break;
    detail::admit(plan, batch[i], w, obj);
  }
  detail::fill_unsatisfied(batch, plan);
  return plan;
}

inline constexpr std::size_t kDefaultBruteForceCap = 20;

/// Exhaustive optimum over all 2^m subsets. Ties prefer the lexicographically
/// smallest sorted id list.
inline BatchPlan brute_force_plan(std::span<const DeploymentRequest> batch,
                                  const RequirementVector& vec, double W, Objective obj,
                                  std::size_t cap = kDefaultBruteForceCap) {
  detail::check_inputs(batch, vec, W);
  if (batch.size() > cap || batch.size() >= 63) {
    throw SizeCapError("brute_force_plan: batch of " + std::to_string(batch.size()) +
                       " exceeds cap " + std::to_string(cap));
  }
  // Enumerate in id order so results do not depend on input order.
  std::vector<std::size_t> idx(batch.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return batch[a].id < batch[b].id; });

  const std::uint64_t total = std::uint64_t{1} << batch.size();
  std::uint64_t best_mask = 0;
  double best_value = 0.0;
  // Bit b stands for the b-th smallest id, so comparing sorted id lists reduces
  // to the lowest differing bit: whoever holds it is smaller, unless the other
  // list ends there (then the other is a prefix, hence smaller).
  auto ids_less = [](std::uint64_t a, std::uint64_t b) {
    const std::uint64_t diff = a ^ b;
    const std::uint64_t low = diff & (~diff + 1);
    const std::uint64_t above = ~((low << 1) - 1);
    if (a & low) return (b & above) != 0;
    return (a & above) == 0;
  };
  for (std::uint64_t mask = 1; mask < total; ++mask) {
    double used = 0.0;
    double value = 0.0;
    bool ok = true;
    for (std::size_t b = 0; b < idx.size() && ok; ++b) {
      if (!(mask >> b & 1U)) continue;
      const Requirement r = vec.values[idx[b]];
      if (!r.feasible()) {
        ok = false;
        break;
      }
      used += r.value();
      value += detail::objective_value(batch[idx[b]], obj);
    }
    if (!ok || used > W + kBudgetSlack) continue;
    if (value > best_value || (value == best_value && best_mask != 0 && ids_less(mask, best_mask))) {
      best_value = value;
      best_mask = mask;
    }
  }

  BatchPlan plan;
  for (std::size_t b = 0; b < idx.size(); ++b) {
    if (best_mask >> b & 1U) {
      const std::size_t i = idx[b];
      detail::admit(plan, batch[i], vec.values[i].value(), obj);
    }
  }
  detail::fill_unsatisfied(batch, plan);
  return plan;
}

struct BatchOptions {
  Objective objective = Objective::Throughput;
  AggregateMode aggregate = AggregateMode::Sum;
  SolveMode solve = SolveMode::MaxOfThree;
};

/// End-to-end planning: requirement matrix, per-request aggregation, optimization,
/// and k strategy recommendations for every admitted request.
inline BatchPlan batch_strat(std::span<const DeploymentRequest> batch, std::span<const Strategy> catalog,
                             const ModelCatalog& models, double W, const BatchOptions& opts = {}) {
  if (batch.empty()) return {};
  const RequirementMatrix matrix = build_matrix(batch, catalog, models, opts.solve);
  const RequirementVector vec = aggregate_rows(matrix, batch, opts.aggregate);
  BatchPlan plan = opts.objective == Objective::Throughput ? plan_throughput(batch, vec, W)
                                                           : plan_payoff(batch, vec, W);
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < batch.size(); ++i) row_of.emplace(batch[i].id, i);
  for (const auto& id : plan.selected) {
    const std::size_t i = row_of.at(id);
    auto rec = recommend_strategies(matrix.row(i), batch[i].k, matrix.strategy_ids());
    plan.recommendations.push_back(std::move(*rec));  // admitted rows always have k finite cells
  }
  return plan;
}

}  // namespace stratrec
