#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "stratrec/adpar.hpp"
#include "stratrec/random.hpp"

using namespace stratrec;

namespace {

const std::vector<Strategy> kExample{{"s1", 0.5, 0.25, 0.28, {}},
                                   {"s2", 0.75, 0.33, 0.28, {}},
                                   {"s3", 0.8, 0.5, 0.14, {}},
                                   {"s4", 0.88, 0.58, 0.14, {}}};
const DeploymentRequest d1{"d1", 0.4, 0.17, 0.28, 3, {}, {}};
const DeploymentRequest d2{"d2", 0.8, 0.2, 0.28, 3, {}, {}};
const DeploymentRequest d3{"d3", 0.7, 0.83, 0.28, 3, {}, {}};

// Test-side oracle: smallest squared gap over all k-subsets, by recursion.
double oracle_squared(const std::vector<Strategy>& catalog, const DeploymentRequest& d, int k) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pick;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (pick.size() == static_cast<std::size_t>(k)) {
      double q = d.quality, c = d.cost, l = d.latency;
      for (std::size_t j : pick) {
        q = std::min(q, catalog[j].quality);
        c = std::max(c, catalog[j].cost);
        l = std::max(l, catalog[j].latency);
      }
      best = std::min(best, (q - d.quality) * (q - d.quality) + (c - d.cost) * (c - d.cost) +
                                (l - d.latency) * (l - d.latency));
      return;
    }
    for (std::size_t j = from; j < catalog.size(); ++j) {
      pick.push_back(j);
      self(self, j + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
  return best;
}

std::vector<Strategy> random_catalog(Xoshiro256& rng, std::size_t n, bool coarse = false) {
  std::vector<Strategy> out;
  auto draw = [&] { return coarse ? static_cast<double>(rng.below(6)) / 5.0 : rng.next_unit(); };
  for (std::size_t j = 0; j < n; ++j) {
    char id[32];
    std::snprintf(id, sizeof id, "s%03zu", j);
    const double q = draw(), c = draw(), l = draw();
    out.push_back({id, q, c, l, {}});
  }
  return out;
}

DeploymentRequest random_request(Xoshiro256& rng, int k) {
  return {"d", rng.uniform(0.5, 1.0), rng.uniform(0.0, 0.5), rng.uniform(0.0, 0.5), k, {}, {}};
}

std::size_t covered_count(const std::vector<Strategy>& catalog, const DeploymentRequest& d) {
  return static_cast<std::size_t>(
      std::count_if(catalog.begin(), catalog.end(), [&](const Strategy& s) { return satisfies(s, d); }));
}

const Strategy& by_id(const std::vector<Strategy>& catalog, const std::string& id) {
  return *std::find_if(catalog.begin(), catalog.end(), [&](const Strategy& s) { return s.id == id; });
}

}  // namespace

TEST(AdparExact, FirstRequestGolden) {
  const AdparResult r = adpar_exact(kExample, d1, 3);
  EXPECT_NEAR(r.alternative.quality, 0.4, 1e-12);
  EXPECT_NEAR(r.alternative.cost, 0.5, 1e-12);
  EXPECT_NEAR(r.alternative.latency, 0.28, 1e-12);
  EXPECT_EQ(r.chosen, (std::vector<std::string>{"s1", "s2", "s3"}));
  EXPECT_NEAR(r.distance, 0.33, 1e-12);
  EXPECT_EQ(r.alternative.k, 3);
}

TEST(AdparExact, SecondRequestMatchesEnumeration) {
  const AdparResult r = adpar_exact(kExample, d2, 3);
  EXPECT_NEAR(oracle_squared(kExample, d2, 3), 0.1469, 1e-12);
  EXPECT_NEAR(r.squared_distance(), 0.1469, 1e-12);
  EXPECT_NEAR(r.alternative.quality, 0.75, 1e-12);
  EXPECT_NEAR(r.alternative.cost, 0.58, 1e-12);
  EXPECT_NEAR(r.alternative.latency, 0.28, 1e-12);
  EXPECT_EQ(r.chosen, (std::vector<std::string>{"s2", "s3", "s4"}));
}

TEST(AdparExact, AlreadyCoveredNeedsNoChange) {
  const AdparResult r = adpar_exact(kExample, d3, 3);
  EXPECT_EQ(r.distance, 0.0);
  EXPECT_EQ(r.alternative, d3);
  EXPECT_EQ(r.chosen, (std::vector<std::string>{"s2", "s3", "s4"}));
  // With more covered strategies than k, the zero-relaxation ones win by id.
  const DeploymentRequest loose{"x", 0.0, 1.0, 1.0, 2, {}, {}};
  EXPECT_EQ(adpar_exact(kExample, loose, 2).chosen, (std::vector<std::string>{"s1", "s2"}));
}

TEST(AdparExact, CardinalityErrors) {
  EXPECT_THROW(adpar_exact(kExample, d1, 5), CardinalityError);
  EXPECT_THROW(adpar_exact({}, d1, 1), CardinalityError);
  EXPECT_THROW(adpar_exact(kExample, d1, 0), CardinalityError);
}

TEST(AdparExact, EqualsEnumerationOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Xoshiro256 rng(derive_seed(77, {seed}));
    const std::size_t n = 5 + rng.below(16);
    const int k = 1 + static_cast<int>(rng.below(5));
    const auto catalog = random_catalog(rng, n, seed % 3 == 0);
    const auto d = random_request(rng, k);
    const AdparResult r = adpar_exact(catalog, d, k);
    EXPECT_NEAR(r.squared_distance(), oracle_squared(catalog, d, k), 1e-9) << "seed " << seed;
    EXPECT_NEAR(r.distance, adpar_brute(catalog, d, k).distance, 1e-9) << "seed " << seed;
  }
}

TEST(AdparExact, ResultInvariants) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Xoshiro256 rng(derive_seed(78, {seed}));
    const std::size_t n = 3 + rng.below(40);
    const int k = 1 + static_cast<int>(rng.below(std::min<std::size_t>(n, 8)));
    const auto catalog = random_catalog(rng, n, seed % 2 == 0);
    const auto d = random_request(rng, k);
    const AdparResult r = adpar_exact(catalog, d, k);

    ASSERT_EQ(r.chosen.size(), static_cast<std::size_t>(k));
    for (const auto& id : r.chosen) EXPECT_TRUE(satisfies(by_id(catalog, id), r.alternative));
    EXPECT_GE(covered_count(catalog, r.alternative), static_cast<std::size_t>(k));
    EXPECT_NEAR(r.squared_distance(), squared_gap(r.alternative, d), 1e-12);
    EXPECT_LE(r.alternative.quality, d.quality);
    EXPECT_GE(r.alternative.cost, d.cost);
    EXPECT_GE(r.alternative.latency, d.latency);

    // Lower bound: every normalized axis reaches the k-th smallest coordinate.
    const NormalizedPoint alt = normalize_request(r.alternative);
    for (Axis a : kAxes) {
      std::vector<double> col;
      for (const auto& s : catalog) col.push_back(normalize(s)[a]);
      std::sort(col.begin(), col.end());
      EXPECT_GE(alt[a], col[static_cast<std::size_t>(k) - 1] - 1e-12);
    }

    // Idempotence.
    EXPECT_NEAR(adpar_exact(catalog, r.alternative, k).distance, 0.0, 1e-12);
  }
}

TEST(AdparExact, MonotoneInCatalogAndK) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Xoshiro256 rng(derive_seed(79, {seed}));
    const auto big = random_catalog(rng, 30);
    const std::vector<Strategy> small(big.begin(), big.begin() + 15);
    const auto d = random_request(rng, 3);
    EXPECT_LE(adpar_exact(big, d, 3).distance, adpar_exact(small, d, 3).distance + 1e-12);
    EXPECT_LE(adpar_exact(big, d, 3).distance, adpar_exact(big, d, 4).distance + 1e-12);
  }
}

TEST(AdparExact, DuplicatesCountTowardCoverage) {
  const std::vector<Strategy> twins{{"a", 0.9, 0.6, 0.1, {}}, {"b", 0.9, 0.6, 0.1, {}}, {"c", 0.1, 0.9, 0.9, {}}};
  const DeploymentRequest d{"d", 0.9, 0.5, 0.1, 2, {}, {}};
  const AdparResult r = adpar_exact(twins, d, 2);
  EXPECT_EQ(r.chosen, (std::vector<std::string>{"a", "b"}));
  EXPECT_NEAR(r.distance, 0.1, 1e-12);
}

TEST(AdparExact, SweepStateInvariants) {
  Xoshiro256 rng(80);
  for (int t = 0; t < 30; ++t) {
    const auto catalog = random_catalog(rng, 25, t % 2 == 0);
    const auto d = random_request(rng, 4);
    const auto relax = detail::relaxations(catalog, d);
    std::size_t calls = 0;
    std::size_t last_cursor = 0;
    double last_best = std::numeric_limits<double>::infinity();
    adpar_exact(catalog, d, 4, [&](const SweepState& st) {
      ++calls;
      ASSERT_EQ(st.R.size(), 3 * catalog.size());
      EXPECT_TRUE(std::is_sorted(st.R.begin(), st.R.end()));
      EXPECT_GE(st.cursor, last_cursor);
      last_cursor = st.cursor;
      EXPECT_EQ(st.R[st.cursor], st.front);
      EXPECT_LE(st.best, last_best);
      last_best = st.best;
      std::size_t active = 0;
      for (std::size_t j = 0; j < catalog.size(); ++j) {
        bool all = true;
        for (std::size_t a = 0; a < 3; ++a) {
          EXPECT_EQ(st.M[j][a], relax[j][a] <= st.front) << "strategy " << j << " axis " << a;
          all = all && st.M[j][a];
        }
        active += all;
      }
      EXPECT_EQ(st.active, active);
      EXPECT_GE(st.front, *std::min_element(st.lower_bounds.begin(), st.lower_bounds.end()));
    });
    EXPECT_GT(calls, 0u);
  }
}

TEST(AdparBrute, WholeCatalogEnvelope) {
  const AdparResult r = adpar_brute(kExample, d1, 4);
  EXPECT_NEAR(r.alternative.quality, 0.4, 1e-12);
  EXPECT_NEAR(r.alternative.cost, 0.58, 1e-12);
  EXPECT_NEAR(r.alternative.latency, 0.28, 1e-12);
  EXPECT_EQ(r.chosen.size(), 4u);
}

TEST(AdparBrute, FirstRequestMatchesExact) {
  const AdparResult r = adpar_brute(kExample, d1, 3);
  EXPECT_EQ(r.chosen, (std::vector<std::string>{"s1", "s2", "s3"}));
  EXPECT_NEAR(r.distance, 0.33, 1e-12);
}

TEST(AdparBrute, SingletonCatalog) {
  const std::vector<Strategy> one{{"s", 0.6, 0.5, 0.4, {}}};
  const DeploymentRequest d{"d", 0.8, 0.3, 0.4, 1, {}, {}};
  const AdparResult r = adpar_brute(one, d, 1);
  EXPECT_NEAR(r.alternative.quality, 0.6, 1e-12);
  EXPECT_NEAR(r.alternative.cost, 0.5, 1e-12);
  EXPECT_NEAR(r.alternative.latency, 0.4, 1e-12);
  EXPECT_NEAR(r.distance, std::sqrt(0.2 * 0.2 + 0.2 * 0.2), 1e-12);
}

TEST(AdparBrute, RefusesAboveCap) {
  Xoshiro256 rng(81);
  const auto catalog = random_catalog(rng, 60);
  EXPECT_THROW(adpar_brute(catalog, random_request(rng, 10), 10), SizeCapError);
  EXPECT_EQ(binomial(20, 5), 15504u);
  EXPECT_EQ(binomial(5, 7), 0u);
}

TEST(BaselineOneDim, FirstRequestRelaxesCostOnly) {
  const auto r = baseline_one_dim(kExample, d1, 3);
  ASSERT_TRUE(r.has_value());
  EXPECT_NEAR(r->alternative.cost, 0.5, 1e-12);
  EXPECT_NEAR(r->alternative.quality, 0.4, 1e-12);
  EXPECT_NEAR(r->distance, 0.33, 1e-12);
  EXPECT_EQ(r->chosen, (std::vector<std::string>{"s1", "s2", "s3"}));
}

TEST(BaselineOneDim, SecondRequestFails) { EXPECT_FALSE(baseline_one_dim(kExample, d2, 3).has_value()); }

TEST(BaselineOneDim, AlreadyCovered) {
  const auto r = baseline_one_dim(kExample, d3, 3);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->distance, 0.0);
}

TEST(BaselineMbb, FullCatalogBox) {
  const AdparResult r = baseline_mbb(kExample, d1, 4);
  EXPECT_NEAR(r.distance, adpar_brute(kExample, d1, 4).distance, 1e-12);
}

TEST(BaselineMbb, ChosenSatisfyAlternative) {
  Xoshiro256 rng(82);
  for (int t = 0; t < 100; ++t) {
    const auto catalog = random_catalog(rng, 10 + rng.below(200));
    const int k = 1 + static_cast<int>(rng.below(10));
    const auto d = random_request(rng, k);
    const AdparResult r = baseline_mbb(catalog, d, k, static_cast<std::uint64_t>(t));
    ASSERT_EQ(r.chosen.size(), static_cast<std::size_t>(k));
    for (const auto& id : r.chosen) EXPECT_TRUE(satisfies(by_id(catalog, id), r.alternative));
    // Same seed, same answer.
    EXPECT_EQ(baseline_mbb(catalog, d, k, static_cast<std::uint64_t>(t)).chosen, r.chosen);
  }
}

TEST(Baselines, NeverBeatExact) {
  Xoshiro256 rng(83);
  double exact_sum = 0.0, mbb_sum = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto catalog = random_catalog(rng, 20);
    const auto d = random_request(rng, 5);
    const double exact = adpar_exact(catalog, d, 5).distance;
    const double mbb = baseline_mbb(catalog, d, 5, static_cast<std::uint64_t>(t)).distance;
    EXPECT_LE(exact, mbb + 1e-12);
    if (auto one = baseline_one_dim(catalog, d, 5)) {
      EXPECT_LE(exact, one->distance + 1e-12);
    }
    exact_sum += exact;
    mbb_sum += mbb;
  }
  EXPECT_GT(mbb_sum / 100.0, exact_sum / 100.0);
}

TEST(SpatialIndex, CountsAndBoxes) {
  Xoshiro256 rng(84);
  std::vector<Point3> pts;
  for (int i = 0; i < 1000; ++i) pts.push_back({rng.next_unit(), rng.next_unit(), rng.next_unit()});
  const StrTree tree(pts, 8);
  EXPECT_EQ(tree.nodes()[tree.root()].count, 1000u);
  for (std::size_t n = 0; n < tree.nodes().size(); ++n) {
    const auto& node = tree.nodes()[n];
    const auto under = tree.points_under(n);
    EXPECT_EQ(under.size(), node.count);
    EXPECT_LE(node.children.size(), 8u);
    for (std::size_t p : under) EXPECT_TRUE(node.box.contains(tree.point(p)));
  }
  auto all = tree.points_under(tree.root());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
}
