#pragma once

// Seeded synthetic instances: strategy catalogs, availability models and request
// batches. Each of the three draws from its own substream of the seed, and each
// record consumes a fixed number of words, so growing one count leaves every
// other record (and the prefix of the grown one) unchanged.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "stratrec/errors.hpp"
#include "stratrec/model.hpp"
#include "stratrec/random.hpp"
#include "stratrec/workforce.hpp"

namespace stratrec {

enum class StrategyDist { Uniform, Normal };

/// Sign convention for generated latency models.
enum class LatencySign {
  Physical,  // latency falls with availability: alpha' = -alpha, beta' = 1
  Positive,  // same construction as quality and cost: beta = 1 - alpha
};

struct GenConfig {
  std::uint64_t seed = 1;
  std::size_t strategy_count = 10000;
  std::size_t batch_size = 10;
  int k = 10;
  double availability = 0.5;
  StrategyDist strategy_dist = StrategyDist::Uniform;
  int trials = 10;
  LatencySign latency_sign = LatencySign::Physical;

  void validate() const {
    if (strategy_count < 1) throw ValidationError("strategy count must be >= 1");
    if (batch_size < 1) throw ValidationError("batch size must be >= 1");
    if (k < 1) throw ValidationError("k must be >= 1");
    if (trials < 1) throw ValidationError("trials must be >= 1");
    if (!(availability >= 0.0 && availability <= 1.0)) {
      throw ValidationError("availability must lie in [0,1]");
    }
  }
};

namespace streams {
inline constexpr std::uint64_t kStrategies = 0x5354524154ULL;
inline constexpr std::uint64_t kModels = 0x4d4f44454cULL;
inline constexpr std::uint64_t kRequests = 0x5245515545ULL;
}  // namespace streams

inline constexpr double kNormalMean = 0.75;
inline constexpr double kNormalStddev = 0.1;
inline constexpr double kUniformLow = 0.5;
inline constexpr double kUniformHigh = 1.0;
inline constexpr double kAlphaLow = 0.5;
inline constexpr double kAlphaHigh = 1.0;
inline constexpr double kThresholdLow = 0.625;
inline constexpr double kThresholdHigh = 1.0;

inline std::string strategy_id(std::size_t j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%07zu", j + 1);
  return buf;
}

inline std::string request_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "d%06zu", i + 1);
  return buf;
}

inline std::vector<Strategy> gen_strategies(const GenConfig& cfg) {
  cfg.validate();
  Xoshiro256 rng(derive_seed(cfg.seed, {streams::kStrategies}));
  auto draw = [&] {
    if (cfg.strategy_dist == StrategyDist::Normal) {
      return std::clamp(rng.normal(kNormalMean, kNormalStddev), 0.0, 1.0);
    }
    return rng.uniform(kUniformLow, kUniformHigh);
  };
  std::vector<Strategy> out;
  out.reserve(cfg.strategy_count);
  for (std::size_t j = 0; j < cfg.strategy_count; ++j) {
    Strategy s;
    s.id = strategy_id(j);
    s.quality = draw();
    s.cost = draw();
    s.latency = draw();
    out.push_back(std::move(s));
  }
  return out;
}

inline ModelCatalog gen_models(std::span<const Strategy> catalog, const GenConfig& cfg) {
  cfg.validate();
  Xoshiro256 rng(derive_seed(cfg.seed, {streams::kModels}));
  ModelCatalog models;
  for (const auto& s : catalog) {
    const double aq = rng.uniform(kAlphaLow, kAlphaHigh);
    const double ac = rng.uniform(kAlphaLow, kAlphaHigh);
    const double al = rng.uniform(kAlphaLow, kAlphaHigh);
    StrategyModels m;
    m.quality = {aq, 1.0 - aq};
    m.cost = {ac, 1.0 - ac};
    m.latency = cfg.latency_sign == LatencySign::Physical ? LinearModel{-al, 1.0}
                                                          : LinearModel{al, 1.0 - al};
    models.set(s.id, m);
  }
  return models;
}

inline std::vector<DeploymentRequest> gen_requests(const GenConfig& cfg) {
  cfg.validate();
  Xoshiro256 rng(derive_seed(cfg.seed, {streams::kRequests}));
  std::vector<DeploymentRequest> out;
  out.reserve(cfg.batch_size);
  for (std::size_t i = 0; i < cfg.batch_size; ++i) {
    DeploymentRequest d;
    d.id = request_id(i);
    d.quality = rng.uniform(kThresholdLow, kThresholdHigh);
    d.cost = rng.uniform(kThresholdLow, kThresholdHigh);
    d.latency = rng.uniform(kThresholdLow, kThresholdHigh);
    d.k = cfg.k;
    out.push_back(std::move(d));
  }
  return out;
}

struct Instance {
  std::vector<Strategy> catalog;
  ModelCatalog models;
  std::vector<DeploymentRequest> batch;
};

inline Instance gen_instance(const GenConfig& cfg) {
  Instance inst;
  inst.catalog = gen_strategies(cfg);
  inst.models = gen_models(inst.catalog, cfg);
  inst.batch = gen_requests(cfg);
  return inst;
}

}  // namespace stratrec
