#pragma once

// Linear availability models and workforce-requirement computation.
//
// A strategy's quality, cost and latency are modeled as alpha * w + beta of the
// available workforce fraction w. Solving each model against a request's
// thresholds yields the minimal w at which the strategy serves the request;
// the per-pair requirements form an m x |S| matrix, and each row is reduced to
// a single per-request figure (sum of the k smallest, or the k-th smallest).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stratrec/errors.hpp"
#include "stratrec/model.hpp"

namespace stratrec {

struct LinearModel {
  double alpha = 0.0;
  double beta = 0.0;

  double at(double w) const { return alpha * w + beta; }

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

/// The three per-parameter models of one strategy (optionally for one request class).
struct StrategyModels {
  LinearModel quality;
  LinearModel cost;
  LinearModel latency;

  const LinearModel& operator[](Axis a) const {
    switch (a) {
      case Axis::Quality: return quality;
      case Axis::Cost: return cost;
      case Axis::Latency: return latency;
    }
    return quality;
  }
  LinearModel& operator[](Axis a) {
    return const_cast<LinearModel&>(std::as_const(*this)[a]);
  }

  /// Quality rises and latency falls as more workers become available.
  bool physical() const { return quality.alpha >= 0.0 && latency.alpha <= 0.0; }

  friend bool operator==(const StrategyModels&, const StrategyModels&) = default;
};

/// Zero-slope models pinned at a strategy's catalog point: the strategy meets a
/// request at w = 0 iff it satisfies its thresholds, and never otherwise.
inline StrategyModels fixed_point_models(const Strategy& s) {
  return {{0.0, s.quality}, {0.0, s.cost}, {0.0, s.latency}};
}

/// Models keyed by (strategy id, parameter), with optional per-request-class
/// overrides that take precedence parameter by parameter.
class ModelCatalog {
 public:
  void set(const std::string& strategy_id, Axis axis, LinearModel m) {
    base_[strategy_id][static_cast<std::size_t>(axis)] = m;
  }
  void set(const std::string& strategy_id, const StrategyModels& m) {
    for (Axis a : kAxes) set(strategy_id, a, m[a]);
  }
  void set_override(const std::string& request_class, const std::string& strategy_id, Axis axis,
                    LinearModel m) {
    overrides_[request_class][strategy_id][static_cast<std::size_t>(axis)] = m;
  }

  bool has_class(const std::string& request_class) const {
    return !request_class.empty() && overrides_.contains(request_class);
  }

  std::optional<StrategyModels> find(const std::string& strategy_id,
                                     const std::string& request_class = {}) const {
    const Partial* over = nullptr;
    if (has_class(request_class)) {
      const auto& per_class = overrides_.at(request_class);
      if (auto it = per_class.find(strategy_id); it != per_class.end()) over = &it->second;
    }
    const Partial* base = nullptr;
    if (auto it = base_.find(strategy_id); it != base_.end()) base = &it->second;

    StrategyModels out;
    for (Axis a : kAxes) {
      const auto i = static_cast<std::size_t>(a);
      if (over && (*over)[i]) {
        out[a] = *(*over)[i];
      } else if (base && (*base)[i]) {
        out[a] = *(*base)[i];
      } else {
        return std::nullopt;
      }
    }
    return out;
  }

  std::size_t size() const { return base_.size(); }

  /// Visits every stored entry as (request_class, strategy_id, axis, model), base entries first
  /// with an empty class. Order is sorted so serialization is deterministic.
  void for_each(const std::function<void(const std::string&, const std::string&, Axis,
                                         const LinearModel&)>& fn) const {
    auto visit = [&](const std::string& cls, const auto& table) {
      std::vector<const std::string*> ids;
      ids.reserve(table.size());
      for (const auto& [id, _] : table) ids.push_back(&id);
      std::sort(ids.begin(), ids.end(), [](auto* a, auto* b) { return *a < *b; });
      for (const auto* id : ids) {
        const auto& partial = table.at(*id);
        for (Axis a : kAxes) {
          if (const auto& m = partial[static_cast<std::size_t>(a)]) fn(cls, *id, a, *m);
        }
      }
    };
    visit(std::string{}, base_);
    for (const auto& [cls, table] : overrides_) visit(cls, table);
  }

 private:
  using Partial = std::array<std::optional<LinearModel>, 3>;
  std::unordered_map<std::string, Partial> base_;
  std::map<std::string, std::unordered_map<std::string, Partial>> overrides_;
};

/// A workforce fraction in [0,1], or INFEASIBLE (stored as +infinity so that
/// it orders after every feasible value).
class Requirement {
 public:
  constexpr Requirement() = default;
  constexpr explicit Requirement(double fraction) : value_(fraction) {}

  static constexpr Requirement infeasible() {
    return Requirement(std::numeric_limits<double>::infinity());
  }

  constexpr bool feasible() const { return value_ != std::numeric_limits<double>::infinity(); }
  constexpr double value() const { return value_; }

  friend constexpr auto operator<=>(const Requirement&, const Requirement&) = default;

 private:
  double value_ = 0.0;
};

enum class SolveMode {
  MaxOfThree,         // max of the three equality solves, cost included
  FeasibilityStrict,  // minimal w in [0,1] meeting all three inequalities
};

enum class AggregateMode { Sum, Max };

namespace detail {

enum class Bound { AtLeast, AtMost };

inline Bound bound_of(Axis a) { return a == Axis::Quality ? Bound::AtLeast : Bound::AtMost; }

}  // namespace detail

/// Minimal availability at which a strategy with `models` serves request `d`.
inline Requirement required_workforce(const StrategyModels& models, const DeploymentRequest& d,
                                      SolveMode mode = SolveMode::MaxOfThree) {
  const std::array<double, 3> threshold{d.quality, d.cost, d.latency};

  if (mode == SolveMode::MaxOfThree) {
    double w = 0.0;
    for (Axis a : kAxes) {
      const LinearModel& m = models[a];
      const double t = threshold[static_cast<std::size_t>(a)];
      if (m.alpha == 0.0) {
        const bool met = detail::bound_of(a) == detail::Bound::AtLeast ? m.beta >= t : m.beta <= t;
        if (!met) return Requirement::infeasible();
        continue;
      }
      w = std::max(w, (t - m.beta) / m.alpha);
    }
    return w > 1.0 ? Requirement::infeasible() : Requirement(w);
  }

  // Intersect the three half-lines {w : model meets threshold} with [0,1].
  double lo = 0.0;
  double hi = 1.0;
  for (Axis a : kAxes) {
    const LinearModel& m = models[a];
    const double t = threshold[static_cast<std::size_t>(a)];
    const bool at_least = detail::bound_of(a) == detail::Bound::AtLeast;
    if (m.alpha == 0.0) {
      if (!(at_least ? m.beta >= t : m.beta <= t)) return Requirement::infeasible();
      continue;
    }
    const double root = (t - m.beta) / m.alpha;
    // alpha > 0: "at least" means w >= root; "at most" means w <= root. alpha < 0 flips both.
    if (at_least == (m.alpha > 0.0)) {
      lo = std::max(lo, root);
    } else {
      hi = std::min(hi, root);
    }
  }
  return lo <= hi ? Requirement(lo) : Requirement::infeasible();
}

/// m x |S| grid of per-(request, strategy) requirements, row-major.
class RequirementMatrix {
 public:
  RequirementMatrix(std::vector<std::string> request_ids, std::vector<std::string> strategy_ids)
      : request_ids_(std::move(request_ids)),
        strategy_ids_(std::move(strategy_ids)),
        cells_(request_ids_.size() * strategy_ids_.size()) {}

  std::size_t rows() const { return request_ids_.size(); }
  std::size_t cols() const { return strategy_ids_.size(); }

  Requirement& at(std::size_t i, std::size_t j) { return cells_[i * cols() + j]; }
  const Requirement& at(std::size_t i, std::size_t j) const { return cells_[i * cols() + j]; }

  std::span<const Requirement> row(std::size_t i) const {
    return {cells_.data() + i * cols(), cols()};
  }
  std::span<Requirement> row(std::size_t i) { return {cells_.data() + i * cols(), cols()}; }

  const std::vector<std::string>& request_ids() const { return request_ids_; }
  const std::vector<std::string>& strategy_ids() const { return strategy_ids_; }

 private:
  std::vector<std::string> request_ids_;
  std::vector<std::string> strategy_ids_;
  std::vector<Requirement> cells_;
};

inline RequirementMatrix build_matrix(std::span<const DeploymentRequest> batch,
                                      std::span<const Strategy> catalog, const ModelCatalog& models,
                                      SolveMode mode = SolveMode::MaxOfThree) {
  if (batch.empty()) throw ValidationError("build_matrix: empty batch");
  if (catalog.empty()) throw ValidationError("build_matrix: empty strategy catalog");

  std::vector<std::string> rids;
  rids.reserve(batch.size());
  for (const auto& d : batch) rids.push_back(d.id);
  std::vector<std::string> sids;
  sids.reserve(catalog.size());
  for (const auto& s : catalog) sids.push_back(s.id);

  // Base models resolved once per column; class overrides are resolved per cell.
  std::vector<std::optional<StrategyModels>> column_models(catalog.size());
  for (std::size_t j = 0; j < catalog.size(); ++j) column_models[j] = models.find(catalog[j].id);

  RequirementMatrix matrix(std::move(rids), std::move(sids));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const DeploymentRequest& d = batch[i];
    const bool overridden = models.has_class(d.request_class);
    auto row = matrix.row(i);
    for (std::size_t j = 0; j < catalog.size(); ++j) {
      std::optional<StrategyModels> resolved;
      const std::optional<StrategyModels>* m = &column_models[j];
      if (overridden) {
        resolved = models.find(catalog[j].id, d.request_class);
        m = &resolved;
      }
      if (!*m) {
        throw ConfigError("no model for request '" + d.id + "' x strategy '" + catalog[j].id + "'");
      }
      row[j] = required_workforce(**m, d, mode);
    }
  }
  return matrix;
}

/// Column indices of the k smallest finite entries of `row`, ascending by
/// (value, tie), using a bounded max-heap. Returns fewer than k indices when
/// fewer finite entries exist. `tie_less` orders equal-valued columns.
inline std::vector<std::size_t> k_smallest(
    std::span<const Requirement> row, std::size_t k,
    const std::function<bool(std::size_t, std::size_t)>& tie_less = std::less<std::size_t>{}) {
  if (k == 0) return {};
  auto less = [&](std::size_t a, std::size_t b) {
    if (row[a] != row[b]) return row[a] < row[b];
    return tie_less(a, b);
  };
  std::vector<std::size_t> heap;
  heap.reserve(k);
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (!row[j].feasible()) continue;
    if (heap.size() < k) {
      heap.push_back(j);
      std::push_heap(heap.begin(), heap.end(), less);
    } else if (less(j, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), less);
      heap.back() = j;
      std::push_heap(heap.begin(), heap.end(), less);
    }
  }
  std::sort_heap(heap.begin(), heap.end(), less);
  return heap;
}

/// Reduces one matrix row to the request's requirement for k strategies.
inline Requirement aggregate(std::span<const Requirement> row, int k, AggregateMode mode) {
  if (k < 1) throw ValidationError("aggregate: k must be >= 1");
  const auto picked = k_smallest(row, static_cast<std::size_t>(k));
  if (picked.size() < static_cast<std::size_t>(k)) return Requirement::infeasible();
  if (mode == AggregateMode::Max) return row[picked.back()];
  double total = 0.0;
  for (std::size_t j : picked) total += row[j].value();
  return total > 1.0 ? Requirement::infeasible() : Requirement(total);
}

inline Requirement aggregate(std::span<const double> row, int k, AggregateMode mode) {
  std::vector<Requirement> r;
  r.reserve(row.size());
  for (double v : row) r.push_back(std::isinf(v) ? Requirement::infeasible() : Requirement(v));
  return aggregate(std::span<const Requirement>(r), k, mode);
}

/// Per-request aggregated requirement, aligned with the batch.
struct RequirementVector {
  std::vector<Requirement> values;
  AggregateMode mode = AggregateMode::Sum;
};

inline RequirementVector aggregate_rows(const RequirementMatrix& matrix,
                                        std::span<const DeploymentRequest> batch,
                                        AggregateMode mode) {
  if (batch.size() != matrix.rows()) throw ValidationError("aggregate_rows: batch/matrix mismatch");
  RequirementVector out{{}, mode};
  out.values.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out.values.push_back(aggregate(matrix.row(i), batch[i].k, mode));
  }
  return out;
}

}  // namespace stratrec
