#pragma once

// Alternative deployment parameters: for a request that cannot be served with
// k strategies, find the closest (squared l2) relaxed request d' that covers at
// least k strategies, and report k of them.
//
// Geometry, in the smaller-is-better normalized space: each strategy j needs a
// per-axis relaxation r_j = max(0, s_j - d). A relaxation vector rho covers j
// iff r_j <= rho componentwise, and the cost is |rho|^2.
//
// adpar_exact sweeps the 3|S| relaxation values in ascending order (list R,
// with strategy list I and axis list D). The sweep front v is the largest
// coordinate of the candidate rho; a strategy joins the active set once all
// three of its relaxations are <= v (tracked in the |S| x 3 matrix M). At each
// front the candidate is refined by pinning one axis at v and solving the
// 2-D projection on the other two axes over the active set. The sweep stops as
// soon as v^2 alone reaches the best objective, since every later front is at
// least that expensive.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "stratrec/errors.hpp"
#include "stratrec/model.hpp"
#include "stratrec/random.hpp"
#include "stratrec/spatial_index.hpp"

namespace stratrec {

struct AdparResult {
  DeploymentRequest alternative;
  std::vector<std::string> chosen;
  double distance = 0.0;  // l2 norm between the original and alternative parameters

  double squared_distance() const { return distance * distance; }
};

/// Squared l2 distance between two requests' (quality, cost, latency).
inline double squared_gap(const DeploymentRequest& a, const DeploymentRequest& b) {
  const double dq = a.quality - b.quality;
  const double dc = a.cost - b.cost;
  const double dl = a.latency - b.latency;
  return dq * dq + dc * dc + dl * dl;
}

/// The componentwise-tightest request covering `members`, never tighter than d.
inline DeploymentRequest envelope(const DeploymentRequest& d, std::span<const Strategy> catalog,
                                  std::span<const std::size_t> members) {
  DeploymentRequest out = d;
  for (std::size_t j : members) {
    out.quality = std::min(out.quality, catalog[j].quality);
    out.cost = std::max(out.cost, catalog[j].cost);
    out.latency = std::max(out.latency, catalog[j].latency);
  }
  return out;
}

struct Relaxation {
  double value = 0.0;
  std::size_t strategy = 0;  // catalog index
  Axis parameter = Axis::Quality;
};

/// Working state of the sweep; exposed for inspection through an observer.
struct SweepState {
  std::vector<double> R;       // relaxation values, non-decreasing
  std::vector<std::size_t> I;  // strategy index of R[i]
  std::vector<Axis> D;         // axis of R[i]
  std::vector<std::array<bool, 3>> M;  // M[j][a]: the front has reached strategy j on axis a
  std::size_t cursor = 0;              // last entry of R absorbed by the front
  double front = 0.0;                  // current sweep value R[cursor]
  std::size_t active = 0;              // strategies with all three axes reached
  std::array<double, 3> lower_bounds{};  // k-th smallest relaxation per axis
  NormalizedPoint candidate{1.0, 1.0, 1.0};  // best alternative found so far
  double best = std::numeric_limits<double>::infinity();  // its squared distance
};

using SweepObserver = std::function<void(const SweepState&)>;

namespace detail {

inline void check_cardinality(std::span<const Strategy> catalog, int k) {
  if (catalog.empty()) throw CardinalityError("ADPaR: empty strategy catalog");
  if (k < 1) throw CardinalityError("ADPaR: k must be >= 1");
  if (static_cast<std::size_t>(k) > catalog.size()) {
    throw CardinalityError("ADPaR: k = " + std::to_string(k) + " exceeds catalog size " +
                           std::to_string(catalog.size()));
  }
}

inline std::vector<std::array<double, 3>> relaxations(std::span<const Strategy> catalog,
                                                      const DeploymentRequest& d) {
  const NormalizedPoint dn = normalize_request(d);
  std::vector<std::array<double, 3>> relax(catalog.size());
  for (std::size_t j = 0; j < catalog.size(); ++j) {
    const NormalizedPoint sn = normalize(catalog[j]);
    for (Axis a : kAxes) relax[j][static_cast<std::size_t>(a)] = std::max(0.0, sn[a] - dn[a]);
  }
  return relax;
}

/// Picks k covered strategies with the smallest own relaxation (ties by id) and
/// builds the tight alternative from them.
inline AdparResult finish(std::span<const Strategy> catalog, const DeploymentRequest& d, int k,
                          const std::vector<std::array<double, 3>>& relax,
                          const std::array<double, 3>& rho) {
  std::vector<std::size_t> covered;
  std::vector<double> own(catalog.size());
  for (std::size_t j = 0; j < catalog.size(); ++j) {
    const auto& r = relax[j];
    if (r[0] <= rho[0] && r[1] <= rho[1] && r[2] <= rho[2]) {
      covered.push_back(j);
      own[j] = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    }
  }
  const auto kk = static_cast<std::size_t>(k);
  std::partial_sort(covered.begin(), covered.begin() + static_cast<std::ptrdiff_t>(kk), covered.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (own[a] != own[b]) return own[a] < own[b];
                      return catalog[a].id < catalog[b].id;
                    });
  covered.resize(kk);
  std::sort(covered.begin(), covered.end(),
            [&](std::size_t a, std::size_t b) { return catalog[a].id < catalog[b].id; });

  AdparResult out;
  out.alternative = envelope(d, catalog, covered);
  for (std::size_t j : covered) out.chosen.push_back(catalog[j].id);
  out.distance = std::sqrt(squared_gap(out.alternative, d));
  return out;
}

/// Sorted insertion keeping `list` ordered by relax[.][axis], ties by index.
inline void insert_sorted(std::vector<std::size_t>& list, std::size_t j, std::size_t axis,
                          const std::vector<std::array<double, 3>>& relax) {
  auto pos = std::upper_bound(list.begin(), list.end(), j, [&](std::size_t a, std::size_t b) {
    if (relax[a][axis] != relax[b][axis]) return relax[a][axis] < relax[b][axis];
    return a < b;
  });
  list.insert(pos, j);
}

struct Projection {
  double objective = std::numeric_limits<double>::infinity();
  double first = 0.0;
  double second = 0.0;
};

/// Minimum of rho_u^2 + rho_w^2 over the active set such that at least k active
/// strategies have r_u <= rho_u and r_w <= rho_w. `by_u` lists the active set by
/// ascending r_u. Only solutions below `limit` are reported.
inline Projection project(const std::vector<std::size_t>& by_u, std::size_t u, std::size_t w,
                          std::size_t k, const std::vector<std::array<double, 3>>& relax,
                          double limit) {
  Projection best;
  best.objective = limit;
  std::priority_queue<double> k_smallest_w;  // max-heap of the k smallest r_w seen so far
  bool found = false;
  for (std::size_t j : by_u) {
    const double ru = relax[j][u];
    if (ru * ru >= best.objective) break;
    const double rw = relax[j][w];
    if (k_smallest_w.size() < k) {
      k_smallest_w.push(rw);
    } else if (rw < k_smallest_w.top()) {
      k_smallest_w.pop();
      k_smallest_w.push(rw);
    }
    if (k_smallest_w.size() == k) {
      const double top = k_smallest_w.top();
      const double obj = ru * ru + top * top;
      if (obj < best.objective) {
        best = {obj, ru, top};
        found = true;
      }
    }
  }
  if (!found) best.objective = std::numeric_limits<double>::infinity();
  return best;
}

}  // namespace detail

/// Exact minimum-distance alternative covering at least k strategies.
inline AdparResult adpar_exact(std::span<const Strategy> catalog, const DeploymentRequest& d, int k,
                               const SweepObserver& observer = {}) {
  detail::check_cardinality(catalog, k);
  const std::size_t n = catalog.size();
  const auto kk = static_cast<std::size_t>(k);

  // Step 1: per-(strategy, axis) relaxations.
  const auto relax = detail::relaxations(catalog, d);

  // Step 2: sorted relaxation list R with parallel strategy list I and axis list D.
  std::vector<Relaxation> entries;
  entries.reserve(3 * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (Axis a : kAxes) entries.push_back({relax[j][static_cast<std::size_t>(a)], j, a});
  }
  std::sort(entries.begin(), entries.end(), [&](const Relaxation& x, const Relaxation& y) {
    if (x.value != y.value) return x.value < y.value;
    if (x.parameter != y.parameter) return x.parameter < y.parameter;
    return catalog[x.strategy].id < catalog[y.strategy].id;
  });
  SweepState st;
  st.R.reserve(3 * n);
  st.I.reserve(3 * n);
  st.D.reserve(3 * n);
  for (const auto& e : entries) {
    st.R.push_back(e.value);
    st.I.push_back(e.strategy);
    st.D.push_back(e.parameter);
  }
  st.M.assign(n, {false, false, false});

  // Step 3: no alternative can sit below the k-th smallest relaxation on any axis;
  // the front starts at the smallest of those three bounds.
  for (Axis a : kAxes) {
    const auto ai = static_cast<std::size_t>(a);
    std::vector<double> col(n);
    for (std::size_t j = 0; j < n; ++j) col[j] = relax[j][ai];
    std::nth_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(kk - 1), col.end());
    st.lower_bounds[ai] = col[kk - 1];
  }
  const double start = *std::min_element(st.lower_bounds.begin(), st.lower_bounds.end());

  std::array<std::vector<std::size_t>, 3> active_by_axis;
  std::vector<std::uint8_t> reached(n, 0);
  auto absorb = [&](std::size_t pos) {
    const std::size_t j = st.I[pos];
    st.M[j][static_cast<std::size_t>(st.D[pos])] = true;
    if (++reached[j] == 3) {
      ++st.active;
      for (std::size_t a = 0; a < 3; ++a) detail::insert_sorted(active_by_axis[a], j, a, relax);
    }
  };

  std::size_t pos = 0;
  while (pos < st.R.size() && st.R[pos] < start) absorb(pos++);

  // Step 4: advance the front one distinct value at a time.
  std::array<double, 3> best_rho{1.0, 1.0, 1.0};
  const NormalizedPoint dn = normalize_request(d);
  while (pos < st.R.size()) {
    const double v = st.R[pos];
    if (v * v >= st.best) break;
    while (pos < st.R.size() && st.R[pos] == v) absorb(pos++);
    st.cursor = pos - 1;
    st.front = v;

    if (st.active >= kk) {
      for (std::size_t pinned = 0; pinned < 3; ++pinned) {
        const std::size_t u = (pinned + 1) % 3;
        const std::size_t w = (pinned + 2) % 3;
        const auto proj = detail::project(active_by_axis[u], u, w, kk, relax, st.best - v * v);
        const double total = v * v + proj.objective;
        if (total < st.best) {
          st.best = total;
          best_rho[pinned] = v;
          best_rho[u] = proj.first;
          best_rho[w] = proj.second;
          st.candidate = {dn.q + best_rho[0], dn.c + best_rho[1], dn.l + best_rho[2]};
        }
      }
    }
    if (observer) observer(st);
  }

  return detail::finish(catalog, d, k, relax, best_rho);
}

inline constexpr std::uint64_t kDefaultSubsetCap = 1'000'000;

/// C(n, k), saturating at UINT64_MAX.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

/// Oracle: evaluates the envelope of every k-subset. Ties go to the
/// lexicographically smallest id list.
inline AdparResult adpar_brute(std::span<const Strategy> catalog, const DeploymentRequest& d, int k,
                               std::uint64_t cap = kDefaultSubsetCap) {
  detail::check_cardinality(catalog, k);
  const auto kk = static_cast<std::size_t>(k);
  const std::uint64_t subsets = binomial(catalog.size(), kk);
  if (subsets > cap) {
    throw SizeCapError("adpar_brute: C(" + std::to_string(catalog.size()) + "," + std::to_string(k) +
                       ") subsets exceed cap " + std::to_string(cap));
  }
  std::vector<std::size_t> by_id(catalog.size());
  std::iota(by_id.begin(), by_id.end(), 0);
  std::sort(by_id.begin(), by_id.end(),
            [&](std::size_t a, std::size_t b) { return catalog[a].id < catalog[b].id; });

  // Lexicographic k-combinations of positions in by_id.
  std::vector<std::size_t> comb(kk);
  std::iota(comb.begin(), comb.end(), 0);
  std::vector<std::size_t> members(kk);
  std::vector<std::size_t> best_members;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = catalog.size();
  while (true) {
    for (std::size_t i = 0; i < kk; ++i) members[i] = by_id[comb[i]];
    const double gap = squared_gap(envelope(d, catalog, members), d);
    if (gap < best) {
      best = gap;
      best_members = members;
    }
    std::size_t i = kk;
    while (i > 0 && comb[i - 1] == n - kk + i - 1) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t t = i; t < kk; ++t) comb[t] = comb[t - 1] + 1;
  }

  AdparResult out;
  out.alternative = envelope(d, catalog, best_members);
  for (std::size_t j : best_members) out.chosen.push_back(catalog[j].id);
  out.distance = std::sqrt(best);
  return out;
}

/// Baseline relaxing a single parameter while holding the other two at d.
/// Returns nullopt when no single axis reaches k strategies.
inline std::optional<AdparResult> baseline_one_dim(std::span<const Strategy> catalog,
                                                   const DeploymentRequest& d, int k) {
  detail::check_cardinality(catalog, k);
  const auto kk = static_cast<std::size_t>(k);
  std::optional<AdparResult> best;
  for (Axis axis : kAxes) {
    std::vector<std::size_t> eligible;
    for (std::size_t j = 0; j < catalog.size(); ++j) {
      const Strategy& s = catalog[j];
      const bool q_ok = axis == Axis::Quality || s.quality >= d.quality;
      const bool c_ok = axis == Axis::Cost || s.cost <= d.cost;
      const bool l_ok = axis == Axis::Latency || s.latency <= d.latency;
      if (q_ok && c_ok && l_ok) eligible.push_back(j);
    }
    if (eligible.size() < kk) continue;
    // Order by how far the relaxed axis would have to move, ties by id.
    auto need = [&](std::size_t j) {
      const Strategy& s = catalog[j];
      switch (axis) {
        case Axis::Quality: return std::max(0.0, d.quality - s.quality);
        case Axis::Cost: return std::max(0.0, s.cost - d.cost);
        case Axis::Latency: return std::max(0.0, s.latency - d.latency);
      }
      return 0.0;
    };
    std::sort(eligible.begin(), eligible.end(), [&](std::size_t a, std::size_t b) {
      const double na = need(a);
      const double nb = need(b);
      if (na != nb) return na < nb;
      return catalog[a].id < catalog[b].id;
    });
    eligible.resize(kk);
    std::sort(eligible.begin(), eligible.end(),
              [&](std::size_t a, std::size_t b) { return catalog[a].id < catalog[b].id; });
    AdparResult r;
    r.alternative = envelope(d, catalog, eligible);
    for (std::size_t j : eligible) r.chosen.push_back(catalog[j].id);
    r.distance = std::sqrt(squared_gap(r.alternative, d));
    if (!best || r.distance < best->distance) best = std::move(r);
  }
  return best;
}

/// Baseline over an R-tree of the normalized strategies: returns the upper
/// corner (joined with d) of the closest node box holding exactly k strategies,
/// or failing that of the closest box holding more, with k of its strategies
/// drawn at random.
inline AdparResult baseline_mbb(std::span<const Strategy> catalog, const DeploymentRequest& d, int k,
                                std::uint64_t seed = 0, std::size_t node_capacity = 8) {
  detail::check_cardinality(catalog, k);
  const auto kk = static_cast<std::size_t>(k);
  std::vector<Point3> pts;
  pts.reserve(catalog.size());
  for (const auto& s : catalog) {
    const NormalizedPoint p = normalize(s);
    pts.push_back({p.q, p.c, p.l});
  }
  const StrTree tree(pts, node_capacity);
  const NormalizedPoint dn = normalize_request(d);
  auto corner_gap = [&](const Box3& b) {
    double g = 0.0;
    for (Axis a : kAxes) {
      const auto ai = static_cast<std::size_t>(a);
      const double delta = std::max(b.hi[ai], dn[a]) - dn[a];
      g += delta * delta;
    }
    return g;
  };

  std::optional<std::size_t> exact;
  std::optional<std::size_t> loose;
  const auto& nodes = tree.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    if (node.count < kk) continue;
    auto& slot = node.count == kk ? exact : loose;
    if (!slot || corner_gap(node.box) < corner_gap(nodes[*slot].box)) slot = i;
  }
  const std::size_t pick = exact ? *exact : *loose;  // the root always holds >= k points

  std::vector<std::size_t> members = tree.points_under(pick);
  std::sort(members.begin(), members.end());
  DeploymentRequest alt = envelope(d, catalog, members);
  if (members.size() > kk) {
    Xoshiro256 rng(derive_seed(seed, {0x4d4242ULL}));
    for (std::size_t i = 0; i < kk; ++i) {
      const std::size_t r = i + static_cast<std::size_t>(rng.below(members.size() - i));
      std::swap(members[i], members[r]);
    }
    members.resize(kk);
  }
  std::sort(members.begin(), members.end(),
            [&](std::size_t a, std::size_t b) { return catalog[a].id < catalog[b].id; });

  AdparResult out;
  out.alternative = alt;
  for (std::size_t j : members) out.chosen.push_back(catalog[j].id);
  out.distance = std::sqrt(squared_gap(alt, d));
  return out;
}

}  // namespace stratrec
