#include "stripley/partitioner.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "stripley/rng.hpp"

namespace stripley::part {

std::vector<geom::STPoint> sample_points(std::span<const geom::STPoint> points,
                                         double fraction, std::uint64_t seed) {
  if (points.empty()) throw std::invalid_argument("cannot sample from empty input");
  if (!(fraction > 0.0) || fraction > 1.0)
    throw std::invalid_argument("sample fraction must be in (0, 1]");
  const std::size_t n = points.size();
  std::size_t k = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * fraction));
  k = std::max<std::size_t>(1, std::min(k, n));

  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  rng::Engine eng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(eng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<geom::STPoint> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(points[idx[i]]);
  return out;
}

std::uint32_t hash_assign(std::uint32_t record_index, std::uint32_t partition_count) {
  if (partition_count == 0) throw std::invalid_argument("partition_count must be >= 1");
  std::uint64_t v = record_index;
  v += 0x9e3779b97f4a7c15ULL;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  v ^= v >> 31;
  return static_cast<std::uint32_t>(v % partition_count);
}

namespace {

double coord_of(const geom::STPoint& p, int dim) {
  switch (dim) {
    case 0: return p.x;
    case 1: return p.y;
    default: return static_cast<double>(p.start_time);
  }
}

struct Builder {
  std::vector<KDBPartitioner::Node> nodes;
  std::size_t max_items;

  std::uint32_t build(const geom::STEnvelope& env, std::vector<geom::STPoint> items,
                      int dim) {
    if (items.size() > max_items) {
      // Prefer the cycled dimension, but a median on a tie-heavy axis (e.g.
      // coarse integer timestamps) can push nearly everything into the <=
      // side. Accept the cycled split only while it stays near-balanced,
      // otherwise fall back to the most balanced of the three.
      int best_d = -1;
      double best_fraction = 1.0;
      for (int attempt = 0; attempt < 3; ++attempt) {
        const int d = (dim + attempt) % 3;
        auto mid = items.begin() + (items.size() - 1) / 2;
        std::nth_element(items.begin(), mid, items.end(),
                         [&](const geom::STPoint& a, const geom::STPoint& b) {
                           return coord_of(a, d) < coord_of(b, d);
                         });
        const double split = coord_of(*mid, d);
        std::size_t left_count = 0;
        for (const auto& p : items)
          if (coord_of(p, d) <= split) ++left_count;
        if (left_count == items.size()) continue;  // no progress on this axis
        const double fraction =
            static_cast<double>(std::max(left_count, items.size() - left_count)) /
            static_cast<double>(items.size());
        if (fraction < best_fraction) {
          best_fraction = fraction;
          best_d = d;
        }
        if (attempt == 0 && fraction <= 0.6) break;  // cycled axis is fine
      }
      if (best_d >= 0) {
        const int d = best_d;
        auto mid = items.begin() + (items.size() - 1) / 2;
        std::nth_element(items.begin(), mid, items.end(),
                         [&](const geom::STPoint& a, const geom::STPoint& b) {
                           return coord_of(a, d) < coord_of(b, d);
                         });
        const double split = coord_of(*mid, d);
        std::vector<geom::STPoint> left, right;
        for (const auto& p : items) {
          (coord_of(p, d) <= split ? left : right).push_back(p);
        }

        geom::STEnvelope left_env = env, right_env = env;
        KDBPartitioner::Node node;
        node.is_leaf = false;
        node.env = env;
        node.split_dim = static_cast<std::uint8_t>(d);
        switch (d) {
          case 0:
            left_env.x_max = right_env.x_min = split;
            node.split_value = split;
            break;
          case 1:
            left_env.y_max = right_env.y_min = split;
            node.split_value = split;
            break;
          default: {
            const std::int64_t split_t = (*mid).start_time;
            left_env.t_max = right_env.t_min = split_t;
            node.split_time = split_t;
            break;
          }
        }
        const std::uint32_t id = static_cast<std::uint32_t>(nodes.size());
        nodes.push_back(node);
        const std::uint32_t l = build(left_env, std::move(left), (d + 1) % 3);
        const std::uint32_t r = build(right_env, std::move(right), (d + 1) % 3);
        nodes[id].left = l;
        nodes[id].right = r;
        return id;
      }
      // Degenerate sample (all identical): stop splitting.
    }
    KDBPartitioner::Node leaf;
    leaf.is_leaf = true;
    leaf.env = env;
    nodes.push_back(leaf);
    return static_cast<std::uint32_t>(nodes.size() - 1);
  }
};

}  // namespace

KDBPartitioner KDBPartitioner::build(std::span<const geom::STPoint> sample,
                                     const geom::STEnvelope& domain,
                                     std::size_t max_items_per_leaf) {
  if (max_items_per_leaf < 1)
    throw std::invalid_argument("max_items_per_leaf must be >= 1");
  Builder builder;
  builder.max_items = max_items_per_leaf;
  std::vector<geom::STPoint> items(sample.begin(), sample.end());
  KDBPartitioner part;
  part.domain_ = domain;
  part.root_ = builder.build(domain, std::move(items), 0);
  part.nodes_ = std::move(builder.nodes);
  part.collect_leaves();
  return part;
}

void KDBPartitioner::collect_leaves() {
  leaves_.clear();
  // DFS left-first so the tie rule "lower-id side" is the left child.
  std::vector<std::uint32_t> stack{root_};
  std::vector<std::uint32_t> order;
  // Iterative preorder with explicit left-first ordering.
  while (!stack.empty()) {
    const std::uint32_t id = stack.back();
    stack.pop_back();
    Node& node = nodes_[id];
    if (node.is_leaf) {
      node.leaf_id = static_cast<std::int64_t>(leaves_.size());
      geom::STEnvelope env = node.env;
      env.envelope_id = node.leaf_id;
      node.env = env;
      leaves_.push_back(env);
    } else {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
}

std::int64_t KDBPartitioner::locate(const geom::STPoint& p) const {
  if (!domain_.contains(p)) throw std::out_of_range("point outside partition domain");
  std::uint32_t id = root_;
  while (!nodes_[id].is_leaf) {
    const Node& node = nodes_[id];
    bool go_left;
    switch (node.split_dim) {
      case 0: go_left = p.x <= node.split_value; break;
      case 1: go_left = p.y <= node.split_value; break;
      default: go_left = p.start_time <= node.split_time; break;
    }
    id = go_left ? node.left : node.right;
  }
  return nodes_[id].leaf_id;
}

std::vector<std::int64_t> KDBPartitioner::assign_cylinder(
    const geom::STCylinder& cyl) const {
  std::vector<std::int64_t> out;
  std::vector<std::uint32_t> stack{root_};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (!geom::envelope_intersects_cylinder(node.env, cyl)) continue;
    if (node.is_leaf) {
      out.push_back(node.leaf_id);
    } else {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

KDBPartitioner KDBPartitioner::from_parts(std::vector<Node> nodes, std::uint32_t root,
                                          const geom::STEnvelope& domain) {
  KDBPartitioner part;
  part.nodes_ = std::move(nodes);
  part.root_ = root;
  part.domain_ = domain;
  part.collect_leaves();
  return part;
}

}  // namespace stripley::part
