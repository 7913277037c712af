#include "stripley/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "stripley/edge_correction.hpp"
#include "stripley/st_index.hpp"

namespace stripley::est {

void DistanceGrid::validate() const {
  if (s_values.empty() || t_values.empty())
    throw std::invalid_argument("distance grid must be non-empty");
  if (s_values.front() <= 0.0 || t_values.front() <= 0)
    throw std::invalid_argument("distance grid must exclude s=0 and t=0");
  if (!std::is_sorted(s_values.begin(), s_values.end(), std::less_equal<>{}) ||
      !std::is_sorted(t_values.begin(), t_values.end(), std::less_equal<>{}))
    throw std::invalid_argument("distance grid must be strictly increasing");
}

DistanceGrid DistanceGrid::regular(double s_step, double s_max, std::int64_t t_step,
                                   std::int64_t t_max) {
  DistanceGrid grid;
  for (double s = s_step; s <= s_max * (1.0 + 1e-12); s += s_step)
    grid.s_values.push_back(s);
  for (std::int64_t t = t_step; t <= t_max; t += t_step) grid.t_values.push_back(t);
  grid.validate();
  return grid;
}

void PairHistogram::add_histogram(const PairHistogram& other) {
  for (std::size_t si = 0; si < cells_s_; ++si)
    for (std::size_t ti = 0; ti < cells_t_; ++ti) add(si, ti, other.at(si, ti));
}

void PairHistogram::add_flat(std::span<const double> values) {
  for (std::size_t si = 0; si < cells_s_; ++si)
    for (std::size_t ti = 0; ti < cells_t_; ++ti)
      add(si, ti, values[si * cells_t_ + ti]);
}

double intensity(std::size_t n, const geom::StudyRegion& region) {
  if (n == 0) throw std::invalid_argument("intensity needs n >= 1");
  return static_cast<double>(n) /
         (region.area() * static_cast<double>(region.duration()));
}

double theoretical_k(double s, double t) { return 2.0 * std::numbers::pi * s * s * t; }

double k_to_l(double k, double s, double t) {
  if (t == 0.0) throw std::invalid_argument("L transform undefined at t=0");
  if (k < 0.0) throw std::invalid_argument("K value must be >= 0");
  return std::sqrt(k / (2.0 * std::numbers::pi * t)) - s;
}

KSurface theoretical_surface(const DistanceGrid& grid) {
  KSurface surf;
  surf.grid = grid;
  surf.kind = SurfaceKind::K;
  surf.values.assign(grid.cells_s(), std::vector<double>(grid.cells_t(), 0.0));
  for (std::size_t si = 0; si < grid.cells_s(); ++si)
    for (std::size_t ti = 0; ti < grid.cells_t(); ++ti)
      surf.values[si][ti] =
          theoretical_k(grid.s_values[si], static_cast<double>(grid.t_values[ti]));
  return surf;
}

KSurface to_l(const KSurface& k_surface) {
  KSurface surf;
  surf.grid = k_surface.grid;
  surf.kind = SurfaceKind::L;
  surf.values = k_surface.values;
  for (std::size_t si = 0; si < surf.grid.cells_s(); ++si)
    for (std::size_t ti = 0; ti < surf.grid.cells_t(); ++ti)
      surf.values[si][ti] =
          k_to_l(k_surface.values[si][ti], surf.grid.s_values[si],
                 static_cast<double>(surf.grid.t_values[ti]));
  return surf;
}

std::optional<std::pair<std::size_t, std::size_t>> bin_pair(const DistanceGrid& grid,
                                                            double d, std::int64_t u) {
  auto s_it = std::lower_bound(grid.s_values.begin(), grid.s_values.end(), d);
  if (s_it == grid.s_values.end()) return std::nullopt;
  auto t_it = std::lower_bound(grid.t_values.begin(), grid.t_values.end(), u);
  if (t_it == grid.t_values.end()) return std::nullopt;
  return std::make_pair(static_cast<std::size_t>(s_it - grid.s_values.begin()),
                        static_cast<std::size_t>(t_it - grid.t_values.begin()));
}

KSurface finalize_surface(const PairHistogram& hist, std::size_t n,
                          const geom::StudyRegion& region, const DistanceGrid& grid) {
  const double scale = region.area() * static_cast<double>(region.duration()) /
                       (static_cast<double>(n) * static_cast<double>(n));
  KSurface surf;
  surf.grid = grid;
  surf.kind = SurfaceKind::K;
  surf.values.assign(grid.cells_s(), std::vector<double>(grid.cells_t(), 0.0));
  for (std::size_t si = 0; si < grid.cells_s(); ++si) {
    for (std::size_t ti = 0; ti < grid.cells_t(); ++ti) {
      double acc = hist.at(si, ti);
      if (si > 0) acc += surf.values[si - 1][ti];
      if (ti > 0) acc += surf.values[si][ti - 1];
      if (si > 0 && ti > 0) acc -= surf.values[si - 1][ti - 1];
      surf.values[si][ti] = acc;
    }
  }
  for (auto& row : surf.values)
    for (auto& v : row) v *= scale;
  return surf;
}

KSurface estimate_surface(std::span<const geom::STPoint> points,
                          const geom::StudyRegion& region, const DistanceGrid& grid,
                          const EstimatorOptions& options,
                          cache::WeightCache* weight_cache,
                          EstimatorTelemetry* telemetry) {
  grid.validate();
  const std::size_t n = points.size();
  if (n < 2) throw std::invalid_argument("K estimation needs n >= 2");
  for (const auto& p : points) {
    if (!region.contains(p))
      throw std::invalid_argument("point outside study region or period");
  }

  cache::WeightCache local_cache(options.coord_tolerance, options.dist_tolerance);
  cache::WeightCache* cache_ptr =
      options.use_cache ? (weight_cache ? weight_cache : &local_cache) : nullptr;

  EstimatorTelemetry tel;
  PairHistogram hist(grid.cells_s(), grid.cells_t());

  auto add_pair = [&](const geom::STPoint& center, const geom::STPoint& neighbor) {
    const double d = geom::spatial_distance(center, neighbor);
    const std::int64_t u = geom::temporal_distance(center, neighbor);
    const auto bin = bin_pair(grid, d, u);
    if (!bin) return;
    const double w = edge::pair_weight(center, d, u, region, cache_ptr);
    hist.add(bin->first, bin->second, 1.0 / w);
    ++tel.in_threshold_pairs;
  };

  if (options.use_index) {
    std::vector<index::IndexedPoint> indexed(n);
    for (std::size_t i = 0; i < n; ++i)
      indexed[i] = {points[i], static_cast<std::uint32_t>(i)};
    const auto t0 = std::chrono::steady_clock::now();
    const auto tree = index::STRTree::build(std::move(indexed), options.node_capacity);
    tel.index_build_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    index::QueryStats stats;
    geom::STCylinder cyl;
    cyl.spatial_radius = grid.s_max();
    cyl.temporal_radius = grid.t_max();
    for (std::size_t i = 0; i < n; ++i) {
      cyl.center = points[i];
      for (const auto& item : tree.range_query(cyl, &stats)) {
        if (item.record_index == i) continue;
        add_pair(points[i], item.pt);
      }
    }
    tel.pair_comparisons = stats.candidate_comparisons;
  } else {
    geom::STCylinder cyl;
    cyl.spatial_radius = grid.s_max();
    cyl.temporal_radius = grid.t_max();
    for (std::size_t i = 0; i < n; ++i) {
      cyl.center = points[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        ++tel.pair_comparisons;
        if (geom::within_cylinder(cyl, points[j])) add_pair(points[i], points[j]);
      }
    }
  }

  if (telemetry) {
    telemetry->pair_comparisons += tel.pair_comparisons;
    telemetry->in_threshold_pairs += tel.in_threshold_pairs;
    telemetry->index_build_seconds += tel.index_build_seconds;
  }
  return finalize_surface(hist, n, region, grid);
}

KSurface diff_surface(const KSurface& estimated_l, const KSurface& upper_l) {
  if (estimated_l.grid != upper_l.grid)
    throw std::invalid_argument("grid mismatch between surfaces");
  KSurface surf;
  surf.grid = estimated_l.grid;
  surf.kind = SurfaceKind::Diff;
  surf.values = estimated_l.values;
  for (std::size_t si = 0; si < surf.grid.cells_s(); ++si)
    for (std::size_t ti = 0; ti < surf.grid.cells_t(); ++ti) {
      const double est = estimated_l.values[si][ti];
      const double up = upper_l.values[si][ti];
      surf.values[si][ti] = est > up ? est - up : 0.0;
    }
  return surf;
}

}  // namespace stripley::est
