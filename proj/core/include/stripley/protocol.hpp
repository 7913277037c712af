#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stripley/codec.hpp"
#include "stripley/estimator.hpp"
#include "stripley/geometry.hpp"
#include "stripley/runtime.hpp"

namespace stripley::proto {

/// Every message payload starts with the protocol version byte, then the
/// message type; object fields use the codec layouts.
inline constexpr std::uint8_t kVersion = 0x01;

enum class MsgType : std::uint8_t {
  Hello = 1,
  Partitioner = 2,
  PointBatch = 3,
  CylinderBatch = 4,
  Compute = 5,
  Partial = 6,
  Done = 7,
  Error = 8,
};

struct Hello {
  std::vector<geom::PlanarPoint> ring;
  std::int64_t period_start = 0;
  std::int64_t period_end = 0;
  est::DistanceGrid grid;
  est::EstimatorOptions options;
  geom::TimeUnit time_unit = geom::TimeUnit::Days;
};

struct PointBatch {
  std::uint32_t task_id = 0;
  std::vector<index::IndexedPoint> points;
};

struct CylinderBatch {
  std::uint32_t task_id = 0;
  std::vector<rt::IndexedCylinder> cylinders;
};

struct Compute {
  std::uint32_t task_id = 0;
  bool simulation_phase = false;
};

/// Inspect the type of a received payload (validates the version byte).
MsgType message_type(std::span<const std::uint8_t> payload);

codec::Bytes encode_hello(const Hello& msg);
Hello decode_hello(std::span<const std::uint8_t> payload);

codec::Bytes encode_partitioner_msg(const part::KDBPartitioner& partitioner);
part::KDBPartitioner decode_partitioner_msg(std::span<const std::uint8_t> payload);

codec::Bytes encode_point_batch(const PointBatch& msg);
PointBatch decode_point_batch(std::span<const std::uint8_t> payload);

codec::Bytes encode_cylinder_batch(const CylinderBatch& msg);
CylinderBatch decode_cylinder_batch(std::span<const std::uint8_t> payload);

codec::Bytes encode_compute(const Compute& msg);
Compute decode_compute(std::span<const std::uint8_t> payload);

codec::Bytes encode_partial(const rt::PartialResult& partial);
rt::PartialResult decode_partial(std::span<const std::uint8_t> payload);

codec::Bytes encode_done();
codec::Bytes encode_error(const std::string& message);
std::string decode_error(std::span<const std::uint8_t> payload);

}  // namespace stripley::proto
