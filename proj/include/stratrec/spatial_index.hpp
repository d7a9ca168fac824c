#pragma once

// Static 3-D R-tree over points, bulk-loaded with Sort-Tile-Recursive packing.
// Exposes its nodes (bounding box + subtree point count) so callers can scan
// minimum bounding boxes directly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace stratrec {

using Point3 = std::array<double, 3>;

struct Box3 {
  Point3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
  Point3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};

  void expand(const Point3& p) {
    for (std::size_t a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  void expand(const Box3& b) {
    expand(b.lo);
    expand(b.hi);
  }
  bool contains(const Point3& p) const {
    for (std::size_t a = 0; a < 3; ++a) {
      if (p[a] < lo[a] || p[a] > hi[a]) return false;
    }
    return true;
  }
};

class StrTree {
 public:
  struct Node {
    Box3 box;
    std::size_t count = 0;           // points in the subtree
    std::vector<std::size_t> children;  // node indices (internal) or point indices (leaf)
    bool leaf = true;
  };

  explicit StrTree(std::span<const Point3> points, std::size_t capacity = 8)
      : points_(points.begin(), points.end()), capacity_(std::max<std::size_t>(capacity, 2)) {
    if (points_.empty()) return;
    std::vector<std::size_t> ids(points_.size());
    std::iota(ids.begin(), ids.end(), 0);
    std::vector<std::size_t> level = pack_leaves(ids);
    while (level.size() > 1) level = pack_nodes(level);
    root_ = level.front();
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t root() const { return root_; }
  const Point3& point(std::size_t i) const { return points_[i]; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  /// Point indices stored under node `n`.
  std::vector<std::size_t> points_under(std::size_t n) const {
    std::vector<std::size_t> out;
    collect(n, out);
    return out;
  }

 private:
  // Tiles `items` into groups of at most capacity_ along each
  // axis in turn: ceil(P^(1/3)) slabs on x, then slices on y, then runs on z.
  template <typename CenterFn>
  std::vector<std::vector<std::size_t>> tile(std::vector<std::size_t> items, CenterFn center) const {
    const std::size_t pages = (items.size() + capacity_ - 1) / capacity_;
    const auto slabs = static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(pages))));
    auto by_axis = [&](std::size_t a) {
      return [&, a](std::size_t x, std::size_t y) {
        const double cx = center(x)[a];
        const double cy = center(y)[a];
        return cx != cy ? cx < cy : x < y;
      };
    };
    std::vector<std::vector<std::size_t>> groups;
    auto at = [&](std::size_t i) { return items.begin() + static_cast<std::ptrdiff_t>(i); };
    const std::size_t n = items.size();
    std::sort(items.begin(), items.end(), by_axis(0));
    const std::size_t slice_size = slabs * capacity_;
    const std::size_t slab_size = slabs * slice_size;
    for (std::size_t s = 0; s < n; s += slab_size) {
      const std::size_t s_end = std::min(n, s + slab_size);
      std::sort(at(s), at(s_end), by_axis(1));
      for (std::size_t t = s; t < s_end; t += slice_size) {
        const std::size_t t_end = std::min(s_end, t + slice_size);
        std::sort(at(t), at(t_end), by_axis(2));
        for (std::size_t g = t; g < t_end; g += capacity_) {
          groups.emplace_back(at(g), at(std::min(t_end, g + capacity_)));
        }
      }
    }
    return groups;
  }

  std::vector<std::size_t> pack_leaves(const std::vector<std::size_t>& ids) {
    std::vector<std::size_t> level;
    for (auto& group : tile(ids, [&](std::size_t i) { return points_[i]; })) {
      Node n;
      for (std::size_t i : group) n.box.expand(points_[i]);
      n.count = group.size();
      n.children = std::move(group);
      nodes_.push_back(std::move(n));
      level.push_back(nodes_.size() - 1);
    }
    return level;
  }

  std::vector<std::size_t> pack_nodes(const std::vector<std::size_t>& ids) {
    std::vector<Point3> centers(nodes_.size());
    for (std::size_t i : ids) {
      for (std::size_t a = 0; a < 3; ++a) centers[i][a] = 0.5 * (nodes_[i].box.lo[a] + nodes_[i].box.hi[a]);
    }
    std::vector<std::size_t> level;
    for (auto& group : tile(ids, [&](std::size_t i) { return centers[i]; })) {
      Node n;
      n.leaf = false;
      for (std::size_t c : group) {
        n.box.expand(nodes_[c].box);
        n.count += nodes_[c].count;
      }
      n.children = std::move(group);
      nodes_.push_back(std::move(n));
      level.push_back(nodes_.size() - 1);
    }
    return level;
  }

  void collect(std::size_t n, std::vector<std::size_t>& out) const {
    const Node& node = nodes_[n];
    if (node.leaf) {
      out.insert(out.end(), node.children.begin(), node.children.end());
      return;
    }
    for (std::size_t c : node.children) collect(c, out);
  }

  std::vector<Point3> points_;
  std::size_t capacity_;
  std::vector<Node> nodes_;
  std::size_t root_ = 0;
};

}  // namespace stratrec
