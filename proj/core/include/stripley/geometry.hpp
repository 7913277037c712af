#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace stripley::geom {

enum class TimeUnit : std::uint8_t {
  Seconds = 0,
  Minutes = 1,
  Hours = 2,
  Days = 3,
  Months = 4,
};

/// A spatiotemporal event in projected planar coordinates (meters) with an
/// integer timestamp. K-function inputs carry start_time == end_time; the
/// remaining fields exist for serialization fidelity.
struct STPoint {
  double x = 0.0;
  double y = 0.0;
  std::uint32_t overlap_count = 1;
  std::int64_t start_time = 0;
  std::int64_t end_time = 0;
  std::int32_t zone_id = 0;

  bool operator==(const STPoint&) const = default;
};

inline STPoint make_point(double x, double y, std::int64_t t) {
  return STPoint{x, y, 1, t, t, 0};
}

/// Axis-aligned spatiotemporal box (the "cube" of tree nodes and partitions).
struct STEnvelope {
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  std::int64_t t_min = 0, t_max = 0;
  std::int32_t zone_id = 0;
  std::int64_t envelope_id = 0;

  bool operator==(const STEnvelope&) const = default;

  bool contains(const STPoint& p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max &&
           p.start_time >= t_min && p.start_time <= t_max;
  }
  bool contains(const STEnvelope& o) const {
    return o.x_min >= x_min && o.x_max <= x_max && o.y_min >= y_min &&
           o.y_max <= y_max && o.t_min >= t_min && o.t_max <= t_max;
  }
  void expand(const STPoint& p);
  void expand(const STEnvelope& o);
  static STEnvelope of_point(const STPoint& p) {
    return STEnvelope{p.x, p.x, p.y, p.y, p.start_time, p.end_time, 0, 0};
  }
};

/// Query / redundancy volume: circle of spatial_radius around the center in
/// the plane, extruded ±temporal_radius in time.
struct STCylinder {
  STPoint center;
  double spatial_radius = 0.0;
  std::int64_t temporal_radius = 0;
  TimeUnit temporal_unit = TimeUnit::Days;

  bool operator==(const STCylinder&) const = default;
};

struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
};

double spatial_distance(const STPoint& p, const STPoint& q);
std::int64_t temporal_distance(const STPoint& p, const STPoint& q);

/// Pair-count indicator: d <= s and u <= t, both inclusive.
bool within_cylinder(const STCylinder& cyl, const STPoint& p);

/// Exact circle-footprint vs rectangle test combined with time-interval
/// overlap. Never reports false for a truly intersecting pair.
bool envelope_intersects_cylinder(const STEnvelope& env, const STCylinder& cyl);

/// Even-odd ray casting; points exactly on the boundary count as inside.
/// `ring` is an ordered simple polygon, first vertex not repeated.
bool point_in_polygon(const PlanarPoint& pt, const std::vector<PlanarPoint>& ring);

/// |shoelace|/2. Throws std::invalid_argument on degenerate input.
double polygon_area(const std::vector<PlanarPoint>& ring);

/// Study polygon (simple, no holes) plus study period. Immutable; area and
/// duration are computed once at construction.
class StudyRegion {
 public:
  StudyRegion(std::vector<PlanarPoint> ring, std::int64_t period_start,
              std::int64_t period_end);

  const std::vector<PlanarPoint>& boundary() const { return ring_; }
  std::int64_t period_start() const { return period_start_; }
  std::int64_t period_end() const { return period_end_; }
  double area() const { return area_; }
  std::int64_t duration() const { return duration_; }

  bool contains(const PlanarPoint& pt) const { return point_in_polygon(pt, ring_); }
  bool contains(const STPoint& p) const {
    return point_in_polygon({p.x, p.y}, ring_) && p.start_time >= period_start_ &&
           p.start_time <= period_end_;
  }

  STEnvelope bounding_envelope() const;

 private:
  std::vector<PlanarPoint> ring_;
  std::int64_t period_start_;
  std::int64_t period_end_;
  double area_;
  std::int64_t duration_;
};

}  // namespace stripley::geom
