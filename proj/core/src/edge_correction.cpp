#include "stripley/edge_correction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace stripley::edge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAngleEps = 1e-9;

// Intersection angles (around the center) of the circle with one boundary
// segment. Tangency is treated as non-crossing: a grazing contact does not
// change the inside-arc measure.
void segment_circle_angles(const geom::PlanarPoint& a, const geom::PlanarPoint& b,
                           const geom::PlanarPoint& c, double r,
                           std::vector<double>& out) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double fx = a.x - c.x, fy = a.y - c.y;
  const double qa = dx * dx + dy * dy;
  if (qa == 0.0) return;
  const double qb = 2.0 * (fx * dx + fy * dy);
  const double qc = fx * fx + fy * fy - r * r;
  const double disc = qb * qb - 4.0 * qa * qc;
  const double scale = qb * qb + std::abs(4.0 * qa * qc);
  if (disc <= 1e-9 * scale) return;
  const double sq = std::sqrt(disc);
  for (const double t : {(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)}) {
    if (t < 0.0 || t > 1.0) continue;
    const double px = a.x + t * dx, py = a.y + t * dy;
    double ang = std::atan2(py - c.y, px - c.x);
    if (ang < 0.0) ang += kTwoPi;
    out.push_back(ang);
  }
}

}  // namespace

double spatial_isotropic_weight(const geom::PlanarPoint& center, double d,
                                const geom::StudyRegion& region) {
  // Trivial distances first: the containment check below walks the whole
  // boundary, and coincident-point pairs (bootstrap duplicates) hit this
  // path once per replicate.
  if (d <= 0.0) return 1.0;
  if (!region.contains(center))
    throw std::invalid_argument("weight center outside study region");

  const auto& ring = region.boundary();
  std::vector<double> angles;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    segment_circle_angles(ring[j], ring[i], center, d, angles);
  }
  if (angles.empty()) return 1.0;

  std::sort(angles.begin(), angles.end());
  // Dedup angles closer than kAngleEps, including across the 0/2pi wrap
  // (a circle through a polygon vertex yields the crossing twice).
  std::vector<double> unique;
  for (double a : angles) {
    if (unique.empty() || a - unique.back() > kAngleEps) unique.push_back(a);
  }
  if (unique.size() > 1 && (unique.front() + kTwoPi) - unique.back() <= kAngleEps)
    unique.pop_back();
  if (unique.size() < 2) return 1.0;

  double inside_span = 0.0;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    const double a0 = unique[i];
    const double a1 = (i + 1 < unique.size()) ? unique[i + 1] : unique[0] + kTwoPi;
    const double mid = 0.5 * (a0 + a1);
    const geom::PlanarPoint probe{center.x + d * std::cos(mid),
                                  center.y + d * std::sin(mid)};
    if (region.contains(probe)) inside_span += a1 - a0;
  }
  return inside_span / kTwoPi;
}

double temporal_isotropic_weight(std::int64_t center_t, std::int64_t u,
                                 const geom::StudyRegion& region) {
  return (center_t - u >= region.period_start() && center_t + u <= region.period_end())
             ? 1.0
             : 0.5;
}

double pair_weight(const geom::STPoint& center, double d, std::int64_t u,
                   const geom::StudyRegion& region, cache::WeightCache* weight_cache) {
  const geom::PlanarPoint c{center.x, center.y};
  double w_spatial, w_temporal;
  if (weight_cache) {
    w_spatial = weight_cache->get_or_compute_spatial(
        center.x, center.y, d, [&] { return spatial_isotropic_weight(c, d, region); });
    w_temporal = weight_cache->get_or_compute_temporal(center.start_time, u, [&] {
      return temporal_isotropic_weight(center.start_time, u, region);
    });
  } else {
    w_spatial = spatial_isotropic_weight(c, d, region);
    w_temporal = temporal_isotropic_weight(center.start_time, u, region);
  }
  return w_spatial * w_temporal;
}

}  // namespace stripley::edge
