#include "stripley/protocol.hpp"

namespace stripley::proto {

namespace {

codec::Writer begin(MsgType type) {
  codec::Writer w;
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(type));
  return w;
}

codec::Reader open(std::span<const std::uint8_t> payload, MsgType expected) {
  codec::Reader r(payload);
  if (r.u8() != kVersion) throw codec::DecodeError("unsupported protocol version", 0);
  const std::size_t at = r.offset();
  if (r.u8() != static_cast<std::uint8_t>(expected))
    throw codec::DecodeError("unexpected message type", at);
  return r;
}

}  // namespace

MsgType message_type(std::span<const std::uint8_t> payload) {
  codec::Reader r(payload);
  if (r.u8() != kVersion) throw codec::DecodeError("unsupported protocol version", 0);
  const std::size_t at = r.offset();
  const std::uint8_t t = r.u8();
  if (t < 1 || t > 8) throw codec::DecodeError("unknown message type", at);
  return static_cast<MsgType>(t);
}

codec::Bytes encode_hello(const Hello& msg) {
  auto w = begin(MsgType::Hello);
  w.u32(static_cast<std::uint32_t>(msg.ring.size()));
  for (const auto& v : msg.ring) {
    w.f64(v.x);
    w.f64(v.y);
  }
  w.i64(msg.period_start);
  w.i64(msg.period_end);
  w.u32(static_cast<std::uint32_t>(msg.grid.s_values.size()));
  for (double s : msg.grid.s_values) w.f64(s);
  w.u32(static_cast<std::uint32_t>(msg.grid.t_values.size()));
  for (std::int64_t t : msg.grid.t_values) w.i64(t);
  w.u8(msg.options.use_index ? 1 : 0);
  w.u8(msg.options.use_cache ? 1 : 0);
  w.f64(msg.options.coord_tolerance);
  w.f64(msg.options.dist_tolerance);
  w.u32(msg.options.node_capacity);
  w.u8(static_cast<std::uint8_t>(msg.time_unit));
  return w.take();
}

Hello decode_hello(std::span<const std::uint8_t> payload) {
  auto r = open(payload, MsgType::Hello);
  Hello msg;
  const std::uint32_t nv = r.u32();
  msg.ring.reserve(nv);
  for (std::uint32_t i = 0; i < nv; ++i) {
    geom::PlanarPoint v;
    v.x = r.f64();
    v.y = r.f64();
    msg.ring.push_back(v);
  }
  msg.period_start = r.i64();
  msg.period_end = r.i64();
  const std::uint32_t cs = r.u32();
  for (std::uint32_t i = 0; i < cs; ++i) msg.grid.s_values.push_back(r.f64());
  const std::uint32_t ct = r.u32();
  for (std::uint32_t i = 0; i < ct; ++i) msg.grid.t_values.push_back(r.i64());
  msg.options.use_index = r.u8() != 0;
  msg.options.use_cache = r.u8() != 0;
  msg.options.coord_tolerance = r.f64();
  msg.options.dist_tolerance = r.f64();
  msg.options.node_capacity = r.u32();
  msg.time_unit = static_cast<geom::TimeUnit>(r.u8());
  r.expect_end();
  return msg;
}

codec::Bytes encode_partitioner_msg(const part::KDBPartitioner& partitioner) {
  auto w = begin(MsgType::Partitioner);
  w.raw(codec::encode_tree(partitioner));
  return w.take();
}

part::KDBPartitioner decode_partitioner_msg(std::span<const std::uint8_t> payload) {
  auto r = open(payload, MsgType::Partitioner);
  return codec::decode_partitioner(payload.subspan(r.offset()));
}

codec::Bytes encode_point_batch(const PointBatch& msg) {
  auto w = begin(MsgType::PointBatch);
  w.u32(msg.task_id);
  w.u32(static_cast<std::uint32_t>(msg.points.size()));
  for (const auto& p : msg.points) {
    w.u32(p.record_index);
    codec::write_point(w, p.pt);
  }
  return w.take();
}

PointBatch decode_point_batch(std::span<const std::uint8_t> payload) {
  auto r = open(payload, MsgType::PointBatch);
  PointBatch msg;
  msg.task_id = r.u32();
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    index::IndexedPoint p;
    p.record_index = r.u32();
    p.pt = codec::read_point(r);
    msg.points.push_back(p);
  }
  r.expect_end();
  return msg;
}

codec::Bytes encode_cylinder_batch(const CylinderBatch& msg) {
  auto w = begin(MsgType::CylinderBatch);
  w.u32(msg.task_id);
  w.u32(static_cast<std::uint32_t>(msg.cylinders.size()));
  for (const auto& c : msg.cylinders) {
    w.u32(c.center_index);
    codec::write_cylinder(w, c.cyl);
  }
  return w.take();
}

CylinderBatch decode_cylinder_batch(std::span<const std::uint8_t> payload) {
  auto r = open(payload, MsgType::CylinderBatch);
  CylinderBatch msg;
  msg.task_id = r.u32();
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    rt::IndexedCylinder c;
    c.center_index = r.u32();
    c.cyl = codec::read_cylinder(r);
    msg.cylinders.push_back(c);
  }
  r.expect_end();
  return msg;
}

codec::Bytes encode_compute(const Compute& msg) {
  auto w = begin(MsgType::Compute);
  w.u32(msg.task_id);
  w.u8(msg.simulation_phase ? 1 : 0);
  return w.take();
}

Compute decode_compute(std::span<const std::uint8_t> payload) {
  auto r = open(payload, MsgType::Compute);
  Compute msg;
  msg.task_id = r.u32();
  msg.simulation_phase = r.u8() != 0;
  r.expect_end();
  return msg;
}

codec::Bytes encode_partial(const rt::PartialResult& partial) {
  auto w = begin(MsgType::Partial);
  w.u32(partial.task_id);
  w.u32(partial.worker_id);
  w.u32(static_cast<std::uint32_t>(partial.histogram.size()));
  for (double v : partial.histogram) w.f64(v);
  w.u64(partial.pair_comparisons);
  w.u64(partial.in_threshold_pairs);
  for (const auto* stats : {&partial.spatial_cache, &partial.temporal_cache}) {
    w.u64(stats->hits);
    w.u64(stats->misses);
    w.u64(stats->insertions);
  }
  return w.take();
}

rt::PartialResult decode_partial(std::span<const std::uint8_t> payload) {
  auto r = open(payload, MsgType::Partial);
  rt::PartialResult partial;
  partial.task_id = r.u32();
  partial.worker_id = r.u32();
  const std::uint32_t n = r.u32();
  partial.histogram.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) partial.histogram.push_back(r.f64());
  partial.pair_comparisons = r.u64();
  partial.in_threshold_pairs = r.u64();
  for (auto* stats : {&partial.spatial_cache, &partial.temporal_cache}) {
    stats->hits = r.u64();
    stats->misses = r.u64();
    stats->insertions = r.u64();
  }
  r.expect_end();
  return partial;
}

codec::Bytes encode_done() { return begin(MsgType::Done).take(); }

codec::Bytes encode_error(const std::string& message) {
  auto w = begin(MsgType::Error);
  w.u32(static_cast<std::uint32_t>(message.size()));
  for (char c : message) w.u8(static_cast<std::uint8_t>(c));
  return w.take();
}

std::string decode_error(std::span<const std::uint8_t> payload) {
  auto r = open(payload, MsgType::Error);
  const std::uint32_t n = r.u32();
  std::string out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(static_cast<char>(r.u8()));
  r.expect_end();
  return out;
}

}  // namespace stripley::proto
