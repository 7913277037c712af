#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stripley/geometry.hpp"
#include "stripley/partitioner.hpp"
#include "stripley/st_index.hpp"

namespace stripley::codec {

using Bytes = std::vector<std::uint8_t>;

enum class TypeId : std::uint8_t {
  Point = 0x01,
  Cylinder = 0x02,
  Envelope = 0x03,
  STRTree = 0x10,
  KDBPartitioner = 0x11,
};

class DecodeError : public std::runtime_error {
 public:
  DecodeError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Little-endian field writer over a growable byte buffer.
class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v);
  void raw(std::span<const std::uint8_t> bytes) {
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
  }
  Bytes take() { return std::move(buf_); }
  const Bytes& bytes() const { return buf_; }

 private:
  Bytes buf_;
};

/// Bounds-checked little-endian reader; all overruns raise DecodeError with
/// the offending byte offset.
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64();
  std::size_t offset() const { return off_; }
  std::size_t remaining() const { return data_.size() - off_; }
  void expect_end() const;

 private:
  void need(std::size_t n) const;
  std::span<const std::uint8_t> data_;
  std::size_t off_ = 0;
};

// Fixed-width object layouts (sizes are the field-width sums).
inline constexpr std::size_t kPointBytes = 41;
inline constexpr std::size_t kEnvelopeBytes = 61;
inline constexpr std::size_t kCylinderBytes = 59;

Bytes encode_point(const geom::STPoint& p);
geom::STPoint decode_point(std::span<const std::uint8_t> bytes);

Bytes encode_cylinder(const geom::STCylinder& c);
geom::STCylinder decode_cylinder(std::span<const std::uint8_t> bytes);

Bytes encode_envelope(const geom::STEnvelope& e);
geom::STEnvelope decode_envelope(std::span<const std::uint8_t> bytes);

Bytes encode_tree(const index::STRTree& tree);
index::STRTree decode_strtree(std::span<const std::uint8_t> bytes);

Bytes encode_tree(const part::KDBPartitioner& partitioner);
part::KDBPartitioner decode_partitioner(std::span<const std::uint8_t> bytes);

// In-place variants used when composing larger messages.
void write_point(Writer& w, const geom::STPoint& p);
geom::STPoint read_point(Reader& r);
void write_cylinder(Writer& w, const geom::STCylinder& c);
geom::STCylinder read_cylinder(Reader& r);
void write_envelope(Writer& w, const geom::STEnvelope& e);
geom::STEnvelope read_envelope(Reader& r);

/// 4-byte big-endian length prefix framing. Payload limit 2^32 - 1.
Bytes frame(std::span<const std::uint8_t> payload);
Bytes unframe(std::span<const std::uint8_t> framed);

}  // namespace stripley::codec
