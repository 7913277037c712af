#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "stripley/edge_correction.hpp"
#include "stripley/estimator.hpp"
#include "stripley/geometry.hpp"
#include "stripley/rng.hpp"

namespace testutil {

using namespace stripley;

inline geom::StudyRegion square_region(double side, std::int64_t period_start = 0,
                                       std::int64_t period_end = 100) {
  return geom::StudyRegion({{0, 0}, {side, 0}, {side, side}, {0, side}}, period_start,
                           period_end);
}

/// Convex polygon: vertices on an ellipse at sorted random angles.
inline std::vector<geom::PlanarPoint> random_convex_ring(rng::Engine& eng,
                                                         double radius_x,
                                                         double radius_y,
                                                         std::size_t vertices) {
  std::vector<double> angles;
  for (std::size_t i = 0; i < vertices; ++i)
    angles.push_back(eng.uniform(0.0, 2.0 * std::numbers::pi));
  std::sort(angles.begin(), angles.end());
  std::vector<geom::PlanarPoint> ring;
  for (double a : angles)
    ring.push_back({radius_x * (1.1 + std::cos(a)), radius_y * (1.1 + std::sin(a))});
  return ring;
}

/// Star-shaped (possibly concave, always simple) polygon around a center.
inline std::vector<geom::PlanarPoint> random_star_ring(rng::Engine& eng, double radius,
                                                       std::size_t vertices) {
  std::vector<geom::PlanarPoint> ring;
  for (std::size_t i = 0; i < vertices; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) /
                     static_cast<double>(vertices);
    const double r = radius * eng.uniform(0.4, 1.0);
    ring.push_back({radius * 1.1 + r * std::cos(a), radius * 1.1 + r * std::sin(a)});
  }
  return ring;
}

inline std::vector<geom::STPoint> uniform_points(rng::Engine& eng,
                                                 const geom::StudyRegion& region,
                                                 std::size_t n) {
  const auto box = region.bounding_envelope();
  std::vector<geom::STPoint> out;
  while (out.size() < n) {
    const geom::PlanarPoint c{eng.uniform(box.x_min, box.x_max),
                              eng.uniform(box.y_min, box.y_max)};
    if (!region.contains(c)) continue;
    out.push_back(geom::make_point(
        c.x, c.y, eng.uniform_int(region.period_start(), region.period_end())));
  }
  return out;
}

/// Gaussian space-time clusters, rejection-clipped to the region.
inline std::vector<geom::STPoint> clustered_points(rng::Engine& eng,
                                                   const geom::StudyRegion& region,
                                                   std::size_t n, std::size_t clusters,
                                                   double sigma_s, double sigma_t) {
  auto normal = [&eng] {
    // Box-Muller on the deterministic engine.
    const double u1 = std::max(eng.real01(), 1e-12);
    const double u2 = eng.real01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  };
  const auto centers = uniform_points(eng, region, clusters);
  std::vector<geom::STPoint> out;
  while (out.size() < n) {
    const auto& c = centers[eng.below(centers.size())];
    const geom::PlanarPoint pt{c.x + sigma_s * normal(), c.y + sigma_s * normal()};
    const double t_raw = static_cast<double>(c.start_time) + sigma_t * normal();
    const std::int64_t t = static_cast<std::int64_t>(std::llround(t_raw));
    if (!region.contains(pt) || t < region.period_start() || t > region.period_end())
      continue;
    out.push_back(geom::make_point(pt.x, pt.y, t));
  }
  return out;
}

/// Independent reference for Eq.-style K: per grid cell, a direct double sum
/// over ordered pairs with per-pair isotropic weights, compensated summation.
/// No index, no cache, no histogram/cumulative-sum path.
inline est::KSurface brute_force_k(std::span<const geom::STPoint> points,
                                   const geom::StudyRegion& region,
                                   const est::DistanceGrid& grid) {
  const std::size_t n = points.size();
  est::KSurface surf;
  surf.grid = grid;
  surf.kind = est::SurfaceKind::K;
  surf.values.assign(grid.cells_s(), std::vector<double>(grid.cells_t(), 0.0));

  struct Pair {
    double d;
    std::int64_t u;
    double inv_w;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = geom::spatial_distance(points[i], points[j]);
      const std::int64_t u = geom::temporal_distance(points[i], points[j]);
      if (d > grid.s_max() || u > grid.t_max()) continue;
      const double w =
          edge::spatial_isotropic_weight({points[i].x, points[i].y}, d, region) *
          edge::temporal_isotropic_weight(points[i].start_time, u, region);
      pairs.push_back({d, u, 1.0 / w});
    }
  }
  const double scale = region.area() * static_cast<double>(region.duration()) /
                       (static_cast<double>(n) * static_cast<double>(n));
  for (std::size_t si = 0; si < grid.cells_s(); ++si) {
    for (std::size_t ti = 0; ti < grid.cells_t(); ++ti) {
      double sum = 0.0, comp = 0.0;
      for (const auto& p : pairs) {
        if (p.d <= grid.s_values[si] && p.u <= grid.t_values[ti]) {
          const double y = p.inv_w - comp;
          const double t = sum + y;
          comp = (t - sum) - y;
          sum = t;
        }
      }
      surf.values[si][ti] = scale * sum;
    }
  }
  return surf;
}

inline bool rel_close(double a, double b, double rel_tol, double abs_tol = 1e-12) {
  return std::abs(a - b) <= std::max(abs_tol, rel_tol * std::max(std::abs(a), std::abs(b)));
}

inline bool surfaces_close(const est::KSurface& a, const est::KSurface& b,
                           double rel_tol = 1e-9) {
  if (a.grid != b.grid) return false;
  for (std::size_t si = 0; si < a.grid.cells_s(); ++si)
    for (std::size_t ti = 0; ti < a.grid.cells_t(); ++ti)
      if (!rel_close(a.values[si][ti], b.values[si][ti], rel_tol)) return false;
  return true;
}

}  // namespace testutil
