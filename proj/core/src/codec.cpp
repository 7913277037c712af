#include "stripley/codec.hpp"

#include <bit>
#include <cstring>

namespace stripley::codec {

void Writer::u16(std::uint16_t v) {
  buf_.push_back(static_cast<std::uint8_t>(v));
  buf_.push_back(static_cast<std::uint8_t>(v >> 8));
}

void Writer::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void Writer::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void Writer::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void Reader::need(std::size_t n) const {
  if (off_ + n > data_.size()) throw DecodeError("unexpected end of input", off_);
}

std::uint8_t Reader::u8() {
  need(1);
  return data_[off_++];
}

std::uint16_t Reader::u16() {
  need(2);
  std::uint16_t v = static_cast<std::uint16_t>(data_[off_]) |
                    static_cast<std::uint16_t>(data_[off_ + 1]) << 8;
  off_ += 2;
  return v;
}

std::uint32_t Reader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[off_ + i]) << (8 * i);
  off_ += 4;
  return v;
}

std::uint64_t Reader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[off_ + i]) << (8 * i);
  off_ += 8;
  return v;
}

double Reader::f64() { return std::bit_cast<double>(u64()); }

void Reader::expect_end() const {
  if (off_ != data_.size()) throw DecodeError("trailing bytes after object", off_);
}

namespace {

void expect_type(Reader& r, TypeId id, const char* what) {
  const std::size_t at = r.offset();
  if (r.u8() != static_cast<std::uint8_t>(id))
    throw DecodeError(std::string("wrong type id for ") + what, at);
}

}  // namespace

void write_point(Writer& w, const geom::STPoint& p) {
  w.u8(static_cast<std::uint8_t>(TypeId::Point));
  w.f64(p.x);
  w.f64(p.y);
  w.u32(p.overlap_count);
  w.i64(p.start_time);
  w.i64(p.end_time);
  w.i32(p.zone_id);
}

geom::STPoint read_point(Reader& r) {
  expect_type(r, TypeId::Point, "point");
  geom::STPoint p;
  p.x = r.f64();
  p.y = r.f64();
  p.overlap_count = r.u32();
  p.start_time = r.i64();
  p.end_time = r.i64();
  p.zone_id = r.i32();
  return p;
}

void write_cylinder(Writer& w, const geom::STCylinder& c) {
  w.u8(static_cast<std::uint8_t>(TypeId::Cylinder));
  write_point(w, c.center);
  w.f64(c.spatial_radius);
  w.i64(c.temporal_radius);
  w.u8(static_cast<std::uint8_t>(c.temporal_unit));
}

geom::STCylinder read_cylinder(Reader& r) {
  expect_type(r, TypeId::Cylinder, "cylinder");
  geom::STCylinder c;
  c.center = read_point(r);
  c.spatial_radius = r.f64();
  c.temporal_radius = r.i64();
  const std::size_t at = r.offset();
  const std::uint8_t unit = r.u8();
  if (unit > 4) throw DecodeError("invalid temporal unit", at);
  c.temporal_unit = static_cast<geom::TimeUnit>(unit);
  return c;
}

void write_envelope(Writer& w, const geom::STEnvelope& e) {
  w.u8(static_cast<std::uint8_t>(TypeId::Envelope));
  w.f64(e.x_min);
  w.f64(e.x_max);
  w.f64(e.y_min);
  w.f64(e.y_max);
  w.i64(e.t_min);
  w.i64(e.t_max);
  w.i32(e.zone_id);
  w.i64(e.envelope_id);
}

geom::STEnvelope read_envelope(Reader& r) {
  expect_type(r, TypeId::Envelope, "envelope");
  geom::STEnvelope e;
  e.x_min = r.f64();
  e.x_max = r.f64();
  e.y_min = r.f64();
  e.y_max = r.f64();
  e.t_min = r.i64();
  e.t_max = r.i64();
  e.zone_id = r.i32();
  e.envelope_id = r.i64();
  return e;
}

Bytes encode_point(const geom::STPoint& p) {
  Writer w;
  write_point(w, p);
  return w.take();
}

geom::STPoint decode_point(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  geom::STPoint p = read_point(r);
  r.expect_end();
  return p;
}

Bytes encode_cylinder(const geom::STCylinder& c) {
  Writer w;
  write_cylinder(w, c);
  return w.take();
}

geom::STCylinder decode_cylinder(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  geom::STCylinder c = read_cylinder(r);
  r.expect_end();
  return c;
}

Bytes encode_envelope(const geom::STEnvelope& e) {
  Writer w;
  write_envelope(w, e);
  return w.take();
}

geom::STEnvelope decode_envelope(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  geom::STEnvelope e = read_envelope(r);
  r.expect_end();
  return e;
}

// ---- STR tree ----
// Header: TypeId | node_capacity u32 | root envelope. DFS node records:
// envelope | is_leaf u8 | child_or_item_count u16 | children recursively
// (internal) or encoded points (leaf). An empty index serializes as one
// empty leaf.

namespace {

void write_str_node(Writer& w, const index::STRTree& tree, std::uint32_t id) {
  const auto& node = tree.nodes()[id];
  write_envelope(w, node.env);
  w.u8(node.is_leaf ? 1 : 0);
  if (node.is_leaf) {
    w.u16(static_cast<std::uint16_t>(node.items.size()));
    for (const auto& item : node.items) write_point(w, item.pt);
  } else {
    w.u16(static_cast<std::uint16_t>(node.children.size()));
    for (std::uint32_t child : node.children) write_str_node(w, tree, child);
  }
}

std::uint32_t read_str_node(Reader& r, std::vector<index::STRTree::Node>& nodes,
                            std::size_t& item_total, int depth) {
  if (depth > 512) throw DecodeError("tree nesting too deep", r.offset());
  index::STRTree::Node node;
  node.env = read_envelope(r);
  const std::size_t at = r.offset();
  const std::uint8_t leaf_flag = r.u8();
  if (leaf_flag > 1) throw DecodeError("invalid leaf flag", at);
  node.is_leaf = leaf_flag == 1;
  const std::uint16_t count = r.u16();
  if (node.is_leaf) {
    for (std::uint16_t i = 0; i < count; ++i) {
      index::IndexedPoint item;
      item.pt = read_point(r);
      item.record_index = static_cast<std::uint32_t>(item_total++);
      node.items.push_back(item);
    }
    nodes.push_back(std::move(node));
    return static_cast<std::uint32_t>(nodes.size() - 1);
  }
  std::vector<std::uint32_t> children;
  for (std::uint16_t i = 0; i < count; ++i) {
    children.push_back(read_str_node(r, nodes, item_total, depth + 1));
  }
  node.children = std::move(children);
  nodes.push_back(std::move(node));
  return static_cast<std::uint32_t>(nodes.size() - 1);
}

}  // namespace

Bytes encode_tree(const index::STRTree& tree) {
  Writer w;
  w.u8(static_cast<std::uint8_t>(TypeId::STRTree));
  w.u32(tree.node_capacity());
  if (tree.empty()) {
    geom::STEnvelope zero{};
    write_envelope(w, zero);
    write_envelope(w, zero);
    w.u8(1);
    w.u16(0);
    return w.take();
  }
  write_envelope(w, tree.nodes()[tree.root()].env);
  write_str_node(w, tree, tree.root());
  return w.take();
}

index::STRTree decode_strtree(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  expect_type(r, TypeId::STRTree, "STR tree");
  const std::uint32_t capacity = r.u32();
  (void)read_envelope(r);  // whole-index envelope; root record repeats it
  std::vector<index::STRTree::Node> nodes;
  std::size_t item_total = 0;
  const std::uint32_t root = read_str_node(r, nodes, item_total, 0);
  r.expect_end();
  if (nodes.size() == 1 && nodes[0].items.empty()) {
    return index::STRTree::build({}, capacity);
  }
  return index::STRTree::from_parts(std::move(nodes), root, capacity, item_total);
}

// ---- KDB partitioner ----
// Header: TypeId | node_capacity u32 (unused, 0) | domain envelope. DFS node
// records: envelope | is_leaf u8 | child count u16 (0 or 2); internal nodes
// append split dimension u8 and the 8-byte split value (f64 for x/y, i64 for
// t) before their two children. Leaf payload is the envelope itself.

namespace {

void write_kdb_node(Writer& w, const part::KDBPartitioner& p, std::uint32_t id) {
  const auto& node = p.nodes()[id];
  write_envelope(w, node.env);
  w.u8(node.is_leaf ? 1 : 0);
  if (node.is_leaf) {
    w.u16(0);
    return;
  }
  w.u16(2);
  w.u8(node.split_dim);
  if (node.split_dim == 2) {
    w.i64(node.split_time);
  } else {
    w.f64(node.split_value);
  }
  write_kdb_node(w, p, node.left);
  write_kdb_node(w, p, node.right);
}

std::uint32_t read_kdb_node(Reader& r, std::vector<part::KDBPartitioner::Node>& nodes,
                            int depth) {
  if (depth > 512) throw DecodeError("tree nesting too deep", r.offset());
  part::KDBPartitioner::Node node;
  node.env = read_envelope(r);
  std::size_t at = r.offset();
  const std::uint8_t leaf_flag = r.u8();
  if (leaf_flag > 1) throw DecodeError("invalid leaf flag", at);
  node.is_leaf = leaf_flag == 1;
  at = r.offset();
  const std::uint16_t count = r.u16();
  if (node.is_leaf) {
    if (count != 0) throw DecodeError("leaf with children", at);
    nodes.push_back(node);
    return static_cast<std::uint32_t>(nodes.size() - 1);
  }
  if (count != 2) throw DecodeError("internal node must have 2 children", at);
  at = r.offset();
  node.split_dim = r.u8();
  if (node.split_dim > 2) throw DecodeError("invalid split dimension", at);
  if (node.split_dim == 2) {
    node.split_time = r.i64();
  } else {
    node.split_value = r.f64();
  }
  const std::uint32_t id = static_cast<std::uint32_t>(nodes.size());
  nodes.push_back(node);
  const std::uint32_t l = read_kdb_node(r, nodes, depth + 1);
  const std::uint32_t rgt = read_kdb_node(r, nodes, depth + 1);
  nodes[id].left = l;
  nodes[id].right = rgt;
  return id;
}

}  // namespace

Bytes encode_tree(const part::KDBPartitioner& partitioner) {
  Writer w;
  w.u8(static_cast<std::uint8_t>(TypeId::KDBPartitioner));
  w.u32(0);
  write_envelope(w, partitioner.domain());
  write_kdb_node(w, partitioner, partitioner.root());
  return w.take();
}

part::KDBPartitioner decode_partitioner(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  expect_type(r, TypeId::KDBPartitioner, "KDB partitioner");
  (void)r.u32();
  const geom::STEnvelope domain = read_envelope(r);
  std::vector<part::KDBPartitioner::Node> nodes;
  const std::uint32_t root = read_kdb_node(r, nodes, 0);
  r.expect_end();
  return part::KDBPartitioner::from_parts(std::move(nodes), root, domain);
}

Bytes frame(std::span<const std::uint8_t> payload) {
  if (payload.size() > 0xffffffffULL)
    throw std::length_error("frame payload exceeds 2^32 - 1 bytes");
  Bytes out;
  out.reserve(payload.size() + 4);
  const std::uint32_t len = static_cast<std::uint32_t>(payload.size());
  out.push_back(static_cast<std::uint8_t>(len >> 24));
  out.push_back(static_cast<std::uint8_t>(len >> 16));
  out.push_back(static_cast<std::uint8_t>(len >> 8));
  out.push_back(static_cast<std::uint8_t>(len));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Bytes unframe(std::span<const std::uint8_t> framed) {
  if (framed.size() < 4) throw DecodeError("truncated frame header", framed.size());
  const std::uint32_t len = static_cast<std::uint32_t>(framed[0]) << 24 |
                            static_cast<std::uint32_t>(framed[1]) << 16 |
                            static_cast<std::uint32_t>(framed[2]) << 8 |
                            static_cast<std::uint32_t>(framed[3]);
  if (framed.size() != 4 + static_cast<std::size_t>(len))
    throw DecodeError("frame length mismatch", 4);
  return Bytes(framed.begin() + 4, framed.end());
}

}  // namespace stripley::codec
