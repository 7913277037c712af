#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "stripley/estimator.hpp"
#include "stripley/geometry.hpp"
#include "stripley/weight_cache.hpp"

namespace stripley::sim {

enum class Method { Cstr, Bootstrap, Permutation };

/// n i.i.d. uniform points over polygon x period (rejection sampling in the
/// bounding box; integer timestamps uniform over [period_start, period_end]).
std::vector<geom::STPoint> generate_cstr(std::size_t n, const geom::StudyRegion& region,
                                         std::uint64_t seed);

/// n draws with replacement from the observed points.
std::vector<geom::STPoint> generate_bootstrap(std::span<const geom::STPoint> points,
                                              std::uint64_t seed);

/// Copy of the observed points with temporal labels exchanged randomly
/// (Fisher-Yates over the time column; coordinates stay in place).
std::vector<geom::STPoint> generate_permutation(std::span<const geom::STPoint> points,
                                                std::uint64_t seed);

std::vector<geom::STPoint> generate(Method method, std::size_t n,
                                    std::span<const geom::STPoint> observed,
                                    const geom::StudyRegion& region,
                                    std::uint64_t seed);

/// m simulated datasets (seeds base..base+m-1) pushed through the estimator
/// and the L transform. A shared weight cache is frozen before the first
/// replicate.
std::vector<est::KSurface> run_simulations(std::span<const geom::STPoint> points,
                                           const geom::StudyRegion& region,
                                           const est::DistanceGrid& grid, Method method,
                                           std::size_t m, std::uint64_t base_seed,
                                           const est::EstimatorOptions& options,
                                           cache::WeightCache* weight_cache = nullptr);

/// Pointwise max / min across the simulated surfaces. Exceeding the upper
/// envelope is one-sided significant at 1/(m+1).
std::pair<est::KSurface, est::KSurface> envelopes(std::span<const est::KSurface> sims);

}  // namespace stripley::sim
