#include "stripley/simulation.hpp"

#include <algorithm>
#include <stdexcept>

#include "stripley/rng.hpp"

namespace stripley::sim {

std::vector<geom::STPoint> generate_cstr(std::size_t n, const geom::StudyRegion& region,
                                         std::uint64_t seed) {
  const geom::STEnvelope box = region.bounding_envelope();
  rng::Engine eng(seed);
  std::vector<geom::STPoint> out;
  out.reserve(n);
  while (out.size() < n) {
    const geom::PlanarPoint candidate{eng.uniform(box.x_min, box.x_max),
                                      eng.uniform(box.y_min, box.y_max)};
    if (!region.contains(candidate)) continue;
    const std::int64_t t = eng.uniform_int(region.period_start(), region.period_end());
    out.push_back(geom::make_point(candidate.x, candidate.y, t));
  }
  return out;
}

std::vector<geom::STPoint> generate_bootstrap(std::span<const geom::STPoint> points,
                                              std::uint64_t seed) {
  if (points.empty()) throw std::invalid_argument("bootstrap needs n >= 1");
  rng::Engine eng(seed);
  std::vector<geom::STPoint> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    out.push_back(points[eng.below(points.size())]);
  return out;
}

std::vector<geom::STPoint> generate_permutation(std::span<const geom::STPoint> points,
                                                std::uint64_t seed) {
  if (points.empty()) throw std::invalid_argument("permutation needs n >= 1");
  std::vector<std::int64_t> times;
  times.reserve(points.size());
  for (const auto& p : points) times.push_back(p.start_time);
  rng::Engine eng(seed);
  for (std::size_t i = times.size() - 1; i > 0; --i) {
    std::swap(times[i], times[eng.below(i + 1)]);
  }
  std::vector<geom::STPoint> out(points.begin(), points.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].start_time = times[i];
    out[i].end_time = times[i];
  }
  return out;
}

std::vector<geom::STPoint> generate(Method method, std::size_t n,
                                    std::span<const geom::STPoint> observed,
                                    const geom::StudyRegion& region,
                                    std::uint64_t seed) {
  switch (method) {
    case Method::Cstr: return generate_cstr(n, region, seed);
    case Method::Bootstrap: return generate_bootstrap(observed, seed);
    case Method::Permutation: return generate_permutation(observed, seed);
  }
  throw std::invalid_argument("unknown simulation method");
}

std::vector<est::KSurface> run_simulations(std::span<const geom::STPoint> points,
                                           const geom::StudyRegion& region,
                                           const est::DistanceGrid& grid, Method method,
                                           std::size_t m, std::uint64_t base_seed,
                                           const est::EstimatorOptions& options,
                                           cache::WeightCache* weight_cache) {
  if (m < 1) throw std::invalid_argument("need at least one simulation");
  if (weight_cache) weight_cache->freeze();
  std::vector<est::KSurface> out;
  out.reserve(m);
  for (std::size_t r = 0; r < m; ++r) {
    const auto sim_points = generate(method, points.size(), points, region,
                                     base_seed + static_cast<std::uint64_t>(r));
    out.push_back(est::to_l(
        est::estimate_surface(sim_points, region, grid, options, weight_cache)));
  }
  return out;
}

std::pair<est::KSurface, est::KSurface> envelopes(std::span<const est::KSurface> sims) {
  if (sims.empty()) throw std::invalid_argument("envelopes need >= 1 surface");
  for (const auto& s : sims) {
    if (s.grid != sims.front().grid)
      throw std::invalid_argument("grid mismatch between simulated surfaces");
  }
  est::KSurface upper = sims.front();
  est::KSurface lower = sims.front();
  for (std::size_t k = 1; k < sims.size(); ++k) {
    for (std::size_t si = 0; si < upper.grid.cells_s(); ++si)
      for (std::size_t ti = 0; ti < upper.grid.cells_t(); ++ti) {
        upper.values[si][ti] = std::max(upper.values[si][ti], sims[k].values[si][ti]);
        lower.values[si][ti] = std::min(lower.values[si][ti], sims[k].values[si][ti]);
      }
  }
  return {upper, lower};
}

}  // namespace stripley::sim
