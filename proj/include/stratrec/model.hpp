#pragma once

// Shared domain types: strategies, deployment requests and worker availability.
//
// Every parameter is stored pre-normalized to [0,1]. Quality is a lower bound
// on a request and "bigger is better" on a strategy; cost and latency are upper
// bounds and "smaller is better".

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stratrec/errors.hpp"

namespace stratrec {

enum class Axis : std::size_t { Quality = 0, Cost = 1, Latency = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::Quality, Axis::Cost, Axis::Latency};

inline const char* axis_name(Axis a) {
  switch (a) {
    case Axis::Quality: return "quality";
    case Axis::Cost: return "cost";
    case Axis::Latency: return "latency";
  }
  return "?";
}

namespace detail {

inline void check_fraction(double v, const char* what, const std::string& id) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(std::string(what) + " of '" + id + "' must lie in [0,1], got " +
                          std::to_string(v));
  }
}

}  // namespace detail

struct Strategy {
  std::string id;
  double quality = 0.0;
  double cost = 0.0;
  double latency = 0.0;
  std::string label;

  void validate() const {
    detail::check_fraction(quality, "quality", id);
    detail::check_fraction(cost, "cost", id);
    detail::check_fraction(latency, "latency", id);
  }

  friend bool operator==(const Strategy&, const Strategy&) = default;
};

struct DeploymentRequest {
  std::string id;
  double quality = 0.0;  // lower bound
  double cost = 0.0;     // upper bound
  double latency = 0.0;  // upper bound
  int k = 1;
  std::optional<double> payoff;  // defaults to cost
  std::string request_class;    // selects per-class model overrides; empty = none

  double effective_payoff() const { return payoff.value_or(cost); }

  void validate() const {
    detail::check_fraction(quality, "quality", id);
    detail::check_fraction(cost, "cost", id);
    detail::check_fraction(latency, "latency", id);
    if (k < 1) throw ValidationError("k of '" + id + "' must be >= 1");
    if (payoff && !(*payoff >= 0.0)) throw ValidationError("payoff of '" + id + "' must be >= 0");
  }

  friend bool operator==(const DeploymentRequest&, const DeploymentRequest&) = default;
};

/// Discrete distribution over the available fraction of suitable workers.
class AvailabilityPdf {
 public:
  struct Outcome {
    double probability;
    double fraction;
  };

  static constexpr double kSumTolerance = 1e-9;

  explicit AvailabilityPdf(std::vector<Outcome> outcomes) : outcomes_(std::move(outcomes)) {
    double total = 0.0;
    for (std::size_t i = 0; i < outcomes_.size(); ++i) {
      const auto& o = outcomes_[i];
      if (!(o.probability >= 0.0 && o.probability <= 1.0)) {
        throw ValidationError("availability outcome " + std::to_string(i) +
                              ": probability out of [0,1]");
      }
      if (!(o.fraction >= 0.0 && o.fraction <= 1.0)) {
        throw ValidationError("availability outcome " + std::to_string(i) +
                              ": fraction out of [0,1]");
      }
      total += o.probability;
    }
    if (std::abs(total - 1.0) > kSumTolerance) {
      throw ValidationError("availability probabilities sum to " + std::to_string(total) +
                            ", expected 1");
    }
  }

  const std::vector<Outcome>& outcomes() const { return outcomes_; }

 private:
  std::vector<Outcome> outcomes_;
};

/// Expected worker availability W of a pdf.
inline double expected_availability(const AvailabilityPdf& pdf) {
  double w = 0.0;
  for (const auto& o : pdf.outcomes()) w += o.probability * o.fraction;
  return std::clamp(w, 0.0, 1.0);
}

/// Non-strict threshold check: quality >= lower bound, cost and latency <= upper bounds.
inline bool satisfies(const Strategy& s, const DeploymentRequest& d) {
  return s.quality >= d.quality && s.cost <= d.cost && s.latency <= d.latency;
}

/// Smaller-is-better coordinates; quality is inverted to (1 - quality).
struct NormalizedPoint {
  double q = 0.0;
  double c = 0.0;
  double l = 0.0;

  double operator[](Axis a) const {
    switch (a) {
      case Axis::Quality: return q;
      case Axis::Cost: return c;
      case Axis::Latency: return l;
    }
    return 0.0;
  }

  bool dominated_by(const NormalizedPoint& other) const {
    return q <= other.q && c <= other.c && l <= other.l;
  }

  friend bool operator==(const NormalizedPoint&, const NormalizedPoint&) = default;
};

inline NormalizedPoint normalize(const Strategy& s) { return {1.0 - s.quality, s.cost, s.latency}; }

inline NormalizedPoint normalize_request(const DeploymentRequest& d) {
  return {1.0 - d.quality, d.cost, d.latency};
}

inline Strategy denormalize(const NormalizedPoint& p, std::string id = {}) {
  return Strategy{std::move(id), 1.0 - p.q, p.c, p.l, {}};
}

}  // namespace stratrec
