#include "stripley/st_index.hpp"

#include <algorithm>
#include <cmath>

namespace stripley::index {

namespace {

// Sort-tile-recursive grouping: sort by x into r vertical slabs, each slab by
// y into r sub-slabs, each sub-slab by t, then chunk into capacity-sized
// groups. KeyX/KeyY/KeyT extract sort keys from the item type.
template <class T, class KeyX, class KeyY, class KeyT>
std::vector<std::vector<T>> str_groups(std::vector<T> items, std::uint32_t capacity,
                                       KeyX key_x, KeyY key_y, KeyT key_t) {
  const std::size_t n = items.size();
  const std::size_t leaves = (n + capacity - 1) / capacity;
  const std::size_t r = static_cast<std::size_t>(
      std::ceil(std::cbrt(static_cast<double>(leaves)) - 1e-9));
  // Slab sizes are multiples of the capacity so chunk boundaries never split
  // a full group; the build then always emits exactly ceil(n / capacity)
  // groups and upper-level packing strictly shrinks.
  const std::size_t slab = r * r * capacity;
  const std::size_t sub = r * capacity;

  std::vector<std::vector<T>> groups;
  std::sort(items.begin(), items.end(),
            [&](const T& a, const T& b) { return key_x(a) < key_x(b); });
  for (std::size_t xs = 0; xs < n; xs += slab) {
    const std::size_t xe = std::min(xs + slab, n);
    std::sort(items.begin() + xs, items.begin() + xe,
              [&](const T& a, const T& b) { return key_y(a) < key_y(b); });
    for (std::size_t ys = xs; ys < xe; ys += sub) {
      const std::size_t ye = std::min(ys + sub, xe);
      std::sort(items.begin() + ys, items.begin() + ye,
                [&](const T& a, const T& b) { return key_t(a) < key_t(b); });
      for (std::size_t ts = ys; ts < ye; ts += capacity) {
        const std::size_t te = std::min(ts + static_cast<std::size_t>(capacity), ye);
        groups.emplace_back(items.begin() + ts, items.begin() + te);
      }
    }
  }
  return groups;
}

geom::STEnvelope envelope_of_points(const std::vector<IndexedPoint>& pts) {
  geom::STEnvelope env = geom::STEnvelope::of_point(pts.front().pt);
  for (std::size_t i = 1; i < pts.size(); ++i) env.expand(pts[i].pt);
  return env;
}

}  // namespace

STRTree STRTree::build(std::vector<IndexedPoint> points, std::uint32_t node_capacity) {
  if (node_capacity < 2) node_capacity = 2;
  STRTree tree;
  tree.node_capacity_ = node_capacity;
  tree.size_ = points.size();
  if (points.empty()) return tree;

  auto leaf_groups = str_groups(
      std::move(points), node_capacity,
      [](const IndexedPoint& p) { return p.pt.x; },
      [](const IndexedPoint& p) { return p.pt.y; },
      [](const IndexedPoint& p) { return p.pt.start_time; });

  std::vector<std::uint32_t> level;
  for (auto& g : leaf_groups) {
    Node node;
    node.is_leaf = true;
    node.env = envelope_of_points(g);
    node.items = std::move(g);
    tree.nodes_.push_back(std::move(node));
    level.push_back(static_cast<std::uint32_t>(tree.nodes_.size() - 1));
  }

  // Pack upper levels with the same recursion over node-envelope centers
  // until a single root remains; equal leaf depth follows by construction.
  while (level.size() > 1) {
    auto center = [&](std::uint32_t id, int axis) -> double {
      const auto& e = tree.nodes_[id].env;
      switch (axis) {
        case 0: return 0.5 * (e.x_min + e.x_max);
        case 1: return 0.5 * (e.y_min + e.y_max);
        default: return 0.5 * (static_cast<double>(e.t_min) + static_cast<double>(e.t_max));
      }
    };
    auto groups = str_groups(
        std::move(level), node_capacity,
        [&](std::uint32_t id) { return center(id, 0); },
        [&](std::uint32_t id) { return center(id, 1); },
        [&](std::uint32_t id) { return center(id, 2); });
    level.clear();
    for (auto& g : groups) {
      Node node;
      node.is_leaf = false;
      node.env = tree.nodes_[g.front()].env;
      for (std::size_t i = 1; i < g.size(); ++i) node.env.expand(tree.nodes_[g[i]].env);
      node.children = std::move(g);
      tree.nodes_.push_back(std::move(node));
      level.push_back(static_cast<std::uint32_t>(tree.nodes_.size() - 1));
    }
  }
  tree.root_ = level.front();
  return tree;
}

std::vector<IndexedPoint> STRTree::range_query(const geom::STCylinder& cyl,
                                               QueryStats* stats) const {
  std::vector<IndexedPoint> result;
  if (root_ == kNone) return result;
  QueryStats local;
  std::vector<std::uint32_t> stack{root_};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    ++local.candidate_comparisons;
    if (!geom::envelope_intersects_cylinder(node.env, cyl)) continue;
    if (node.is_leaf) {
      for (const auto& item : node.items) {
        ++local.candidate_comparisons;
        if (geom::within_cylinder(cyl, item.pt)) result.push_back(item);
      }
    } else {
      for (std::uint32_t child : node.children) stack.push_back(child);
    }
  }
  if (stats) stats->candidate_comparisons += local.candidate_comparisons;
  return result;
}

STRTree STRTree::from_parts(std::vector<Node> nodes, std::uint32_t root,
                            std::uint32_t node_capacity, std::size_t size) {
  STRTree tree;
  tree.nodes_ = std::move(nodes);
  tree.root_ = root;
  tree.node_capacity_ = node_capacity;
  tree.size_ = size;
  return tree;
}

}  // namespace stripley::index
