#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stripley/geometry.hpp"

namespace stripley::part {

/// Uniform sample without replacement, size max(1, round(n * fraction)),
/// deterministic under seed. Throws on empty input.
std::vector<geom::STPoint> sample_points(std::span<const geom::STPoint> points,
                                         double fraction, std::uint64_t seed);

/// Baseline hash partitioning over the point's record index.
std::uint32_t hash_assign(std::uint32_t record_index, std::uint32_t partition_count);

/// KDB-tree partitioner: median splits of the whole domain cycling x -> y -> t
/// over a point sample. Leaves tile the domain exactly; boundary ties go to
/// the lower-id (left) side. Immutable after build.
class KDBPartitioner {
 public:
  struct Node {
    geom::STEnvelope env;
    bool is_leaf = true;
    std::uint8_t split_dim = 0;     // 0 x, 1 y, 2 t (internal only)
    double split_value = 0.0;       // x/y splits
    std::int64_t split_time = 0;    // t splits
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::int64_t leaf_id = -1;      // leaves only
  };

  static KDBPartitioner build(std::span<const geom::STPoint> sample,
                              const geom::STEnvelope& domain,
                              std::size_t max_items_per_leaf);

  /// The unique leaf containing p. Throws std::out_of_range when p is outside
  /// the domain.
  std::int64_t locate(const geom::STPoint& p) const;

  /// All leaf ids whose envelope intersects the cylinder.
  std::vector<std::int64_t> assign_cylinder(const geom::STCylinder& cyl) const;

  const geom::STEnvelope& domain() const { return domain_; }
  const std::vector<geom::STEnvelope>& leaves() const { return leaves_; }
  std::size_t leaf_count() const { return leaves_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::uint32_t root() const { return root_; }

  static KDBPartitioner from_parts(std::vector<Node> nodes, std::uint32_t root,
                                   const geom::STEnvelope& domain);

 private:
  geom::STEnvelope domain_;
  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
  std::vector<geom::STEnvelope> leaves_;  // indexed by leaf_id

  void collect_leaves();
};

}  // namespace stripley::part
