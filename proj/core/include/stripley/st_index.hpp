#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "stripley/geometry.hpp"

namespace stripley::index {

/// A point plus the record index that identifies it across partitions and
/// the wire (j != i exclusion is index-based, not coordinate-based).
struct IndexedPoint {
  geom::STPoint pt;
  std::uint32_t record_index = 0;

  bool operator==(const IndexedPoint&) const = default;
};

struct QueryStats {
  std::uint64_t candidate_comparisons = 0;
};

/// STR-packed 3-D R-tree, bulk-load only. Immutable after build; safe for
/// concurrent queries (per-query stats are caller-owned).
class STRTree {
 public:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  struct Node {
    geom::STEnvelope env;
    bool is_leaf = true;
    std::vector<std::uint32_t> children;  // node ids, internal nodes only
    std::vector<IndexedPoint> items;      // leaf nodes only
  };

  STRTree() = default;

  static STRTree build(std::vector<IndexedPoint> points, std::uint32_t node_capacity);

  std::vector<IndexedPoint> range_query(const geom::STCylinder& cyl,
                                        QueryStats* stats = nullptr) const;

  bool empty() const { return root_ == kNone; }
  std::size_t size() const { return size_; }
  std::uint32_t node_capacity() const { return node_capacity_; }
  std::uint32_t root() const { return root_; }
  const std::vector<Node>& nodes() const { return nodes_; }

  /// Used by the codec when reconstructing a tree from its wire form.
  static STRTree from_parts(std::vector<Node> nodes, std::uint32_t root,
                            std::uint32_t node_capacity, std::size_t size);

 private:
  std::vector<Node> nodes_;
  std::uint32_t root_ = kNone;
  std::uint32_t node_capacity_ = 16;
  std::size_t size_ = 0;
};

}  // namespace stripley::index
