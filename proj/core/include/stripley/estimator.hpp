#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stripley/geometry.hpp"
#include "stripley/weight_cache.hpp"

namespace stripley::est {

/// Ascending positive spatial and temporal distance thresholds. Grids exclude
/// s = 0 and t = 0 (the L transform divides by t).
struct DistanceGrid {
  std::vector<double> s_values;
  std::vector<std::int64_t> t_values;

  void validate() const;
  double s_max() const { return s_values.back(); }
  std::int64_t t_max() const { return t_values.back(); }
  std::size_t cells_s() const { return s_values.size(); }
  std::size_t cells_t() const { return t_values.size(); }

  static DistanceGrid regular(double s_step, double s_max, std::int64_t t_step,
                              std::int64_t t_max);

  bool operator==(const DistanceGrid&) const = default;
};

enum class SurfaceKind { K, L, Diff };

struct KSurface {
  DistanceGrid grid;
  std::vector<std::vector<double>> values;  // [s index][t index]
  SurfaceKind kind = SurfaceKind::K;
};

struct EstimatorOptions {
  bool use_index = false;
  bool use_cache = false;
  double coord_tolerance = 0.0;
  double dist_tolerance = 0.0;
  std::uint32_t node_capacity = 16;
};

struct EstimatorTelemetry {
  std::uint64_t pair_comparisons = 0;  // candidate tests (brute force or index)
  std::uint64_t in_threshold_pairs = 0;
  double index_build_seconds = 0.0;
};

/// Histogram of weighted pair counts prior to the cumulative sum; cells are
/// compensated (Kahan) so accumulation order does not leak into results.
class PairHistogram {
 public:
  PairHistogram(std::size_t cells_s, std::size_t cells_t)
      : cells_s_(cells_s), cells_t_(cells_t), sum_(cells_s * cells_t, 0.0),
        comp_(cells_s * cells_t, 0.0) {}

  void add(std::size_t si, std::size_t ti, double value) {
    const std::size_t i = si * cells_t_ + ti;
    const double y = value - comp_[i];
    const double t = sum_[i] + y;
    comp_[i] = (t - sum_[i]) - y;
    sum_[i] = t;
  }
  void add_histogram(const PairHistogram& other);
  void add_flat(std::span<const double> values);

  double at(std::size_t si, std::size_t ti) const { return sum_[si * cells_t_ + ti]; }
  std::span<const double> flat() const { return sum_; }
  std::size_t cells_s() const { return cells_s_; }
  std::size_t cells_t() const { return cells_t_; }

 private:
  std::size_t cells_s_;
  std::size_t cells_t_;
  std::vector<double> sum_;
  std::vector<double> comp_;
};

/// n / (A * D). Throws when n == 0.
double intensity(std::size_t n, const geom::StudyRegion& region);

/// CSTR expectation 2*pi*s^2*t.
double theoretical_k(double s, double t);

/// L transform: sqrt(k / (2*pi*t)) - s. Throws when t == 0.
double k_to_l(double k, double s, double t);

KSurface theoretical_surface(const DistanceGrid& grid);
KSurface to_l(const KSurface& k_surface);

/// Bin a pair's distances into the first grid cell at or above them; nullopt
/// when beyond the grid maxima.
std::optional<std::pair<std::size_t, std::size_t>> bin_pair(const DistanceGrid& grid,
                                                            double d, std::int64_t u);

/// Turn an accumulated pair histogram into the K surface: 2-D cumulative sum
/// scaled by A*D/n^2.
KSurface finalize_surface(const PairHistogram& hist, std::size_t n,
                          const geom::StudyRegion& region, const DistanceGrid& grid);

/// Full Ripley's space-time K estimation over the grid. All points must lie
/// inside the region spatially and temporally; n >= 2.
KSurface estimate_surface(std::span<const geom::STPoint> points,
                          const geom::StudyRegion& region, const DistanceGrid& grid,
                          const EstimatorOptions& options,
                          cache::WeightCache* weight_cache = nullptr,
                          EstimatorTelemetry* telemetry = nullptr);

/// |est - upper| where the estimate exceeds the upper envelope, 0 elsewhere.
KSurface diff_surface(const KSurface& estimated_l, const KSurface& upper_l);

}  // namespace stripley::est
