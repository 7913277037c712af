#pragma once

#include "stripley/geometry.hpp"
#include "stripley/weight_cache.hpp"

namespace stripley::edge {

/// Fraction of the circle of radius d centered at `center` whose arc lies
/// inside the study polygon (isotropic spatial correction). d == 0 returns 1.
/// Throws std::invalid_argument when the center is outside the region.
double spatial_isotropic_weight(const geom::PlanarPoint& center, double d,
                                const geom::StudyRegion& region);

/// 1.0 when both ends of the interval [center_t - u, center_t + u] lie within
/// the study period (inclusive), 0.5 otherwise.
double temporal_isotropic_weight(std::int64_t center_t, std::int64_t u,
                                 const geom::StudyRegion& region);

/// Product of the spatial and temporal weights for a pair with center point
/// `center` at spatial distance d and temporal distance u. Each factor goes
/// through the cache when one is supplied.
double pair_weight(const geom::STPoint& center, double d, std::int64_t u,
                   const geom::StudyRegion& region,
                   cache::WeightCache* weight_cache = nullptr);

}  // namespace stripley::edge
