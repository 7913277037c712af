#include "stripley/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stripley::geom {

void STEnvelope::expand(const STPoint& p) {
  x_min = std::min(x_min, p.x);
  x_max = std::max(x_max, p.x);
  y_min = std::min(y_min, p.y);
  y_max = std::max(y_max, p.y);
  t_min = std::min(t_min, p.start_time);
  t_max = std::max(t_max, p.end_time);
}

void STEnvelope::expand(const STEnvelope& o) {
  x_min = std::min(x_min, o.x_min);
  x_max = std::max(x_max, o.x_max);
  y_min = std::min(y_min, o.y_min);
  y_max = std::max(y_max, o.y_max);
  t_min = std::min(t_min, o.t_min);
  t_max = std::max(t_max, o.t_max);
}

double spatial_distance(const STPoint& p, const STPoint& q) {
  // Plain sqrt: coordinates are projected meters, so dx*dx cannot overflow,
  // and this sits on the n^2 hot path where std::hypot is several times
  // slower.
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return std::sqrt(dx * dx + dy * dy);
}

std::int64_t temporal_distance(const STPoint& p, const STPoint& q) {
  return p.start_time >= q.start_time ? p.start_time - q.start_time
                                      : q.start_time - p.start_time;
}

bool within_cylinder(const STCylinder& cyl, const STPoint& p) {
  return spatial_distance(cyl.center, p) <= cyl.spatial_radius &&
         temporal_distance(cyl.center, p) <= cyl.temporal_radius;
}

bool envelope_intersects_cylinder(const STEnvelope& env, const STCylinder& cyl) {
  const std::int64_t ct = cyl.center.start_time;
  if (ct - cyl.temporal_radius > env.t_max || ct + cyl.temporal_radius < env.t_min)
    return false;
  const double cx = std::clamp(cyl.center.x, env.x_min, env.x_max);
  const double cy = std::clamp(cyl.center.y, env.y_min, env.y_max);
  return std::hypot(cx - cyl.center.x, cy - cyl.center.y) <= cyl.spatial_radius;
}

namespace {

bool on_segment(const PlanarPoint& p, const PlanarPoint& a, const PlanarPoint& b) {
  const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  const double scale = std::max({std::abs(a.x), std::abs(a.y), std::abs(b.x),
                                 std::abs(b.y), std::abs(p.x), std::abs(p.y), 1.0});
  if (std::abs(cross) > 1e-12 * scale * scale) return false;
  return p.x >= std::min(a.x, b.x) - 1e-12 * scale &&
         p.x <= std::max(a.x, b.x) + 1e-12 * scale &&
         p.y >= std::min(a.y, b.y) - 1e-12 * scale &&
         p.y <= std::max(a.y, b.y) + 1e-12 * scale;
}

bool segments_properly_intersect(const PlanarPoint& a, const PlanarPoint& b,
                                 const PlanarPoint& c, const PlanarPoint& d) {
  auto orient = [](const PlanarPoint& p, const PlanarPoint& q, const PlanarPoint& r) {
    const double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    return (v > 0.0) - (v < 0.0);
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

}  // namespace

bool point_in_polygon(const PlanarPoint& pt, const std::vector<PlanarPoint>& ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (on_segment(pt, ring[i], ring[(i + 1) % n])) return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const PlanarPoint& a = ring[i];
    const PlanarPoint& b = ring[j];
    if ((a.y > pt.y) != (b.y > pt.y)) {
      const double x_cross = a.x + (pt.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (pt.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

double polygon_area(const std::vector<PlanarPoint>& ring) {
  if (ring.size() < 3) throw std::invalid_argument("polygon needs >= 3 vertices");
  double acc = 0.0;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    acc += ring[j].x * ring[i].y - ring[i].x * ring[j].y;
  }
  const double area = std::abs(acc) / 2.0;
  if (!(area > 0.0)) throw std::invalid_argument("degenerate polygon (zero area)");
  return area;
}

StudyRegion::StudyRegion(std::vector<PlanarPoint> ring, std::int64_t period_start,
                         std::int64_t period_end)
    : ring_(std::move(ring)), period_start_(period_start), period_end_(period_end) {
  // Accept a closed ring but store it open.
  if (ring_.size() >= 2 && ring_.front().x == ring_.back().x &&
      ring_.front().y == ring_.back().y) {
    ring_.pop_back();
  }
  if (ring_.size() < 3) throw std::invalid_argument("polygon needs >= 3 vertices");
  for (const auto& v : ring_) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
      throw std::invalid_argument("polygon vertex not finite");
  }
  const std::size_t n = ring_.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;  // adjacent edges share a vertex
      if (segments_properly_intersect(ring_[i], ring_[(i + 1) % n], ring_[j],
                                      ring_[(j + 1) % n])) {
        throw std::invalid_argument("polygon is self-intersecting");
      }
    }
  }
  area_ = polygon_area(ring_);
  duration_ = period_end_ - period_start_;
  if (duration_ <= 0) throw std::invalid_argument("study period duration must be > 0");
}

STEnvelope StudyRegion::bounding_envelope() const {
  STEnvelope env;
  env.x_min = env.x_max = ring_[0].x;
  env.y_min = env.y_max = ring_[0].y;
  for (const auto& v : ring_) {
    env.x_min = std::min(env.x_min, v.x);
    env.x_max = std::max(env.x_max, v.x);
    env.y_min = std::min(env.y_min, v.y);
    env.y_max = std::max(env.y_max, v.y);
  }
  env.t_min = period_start_;
  env.t_max = period_end_;
  return env;
}

}  // namespace stripley::geom
