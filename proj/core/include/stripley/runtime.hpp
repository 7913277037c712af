#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "stripley/estimator.hpp"
#include "stripley/geometry.hpp"
#include "stripley/partitioner.hpp"
#include "stripley/simulation.hpp"
#include "stripley/st_index.hpp"
#include "stripley/weight_cache.hpp"

namespace stripley::rt {

enum class PartitionerChoice { Kdb, Hash };
enum class Mode { Local, Distributed };

struct JobSpec {
  est::DistanceGrid grid;
  sim::Method method = sim::Method::Cstr;
  std::uint32_t sims = 99;
  std::uint64_t seed = 1;
  est::EstimatorOptions options;
  PartitionerChoice partitioner = PartitionerChoice::Kdb;
  std::uint32_t partitions = 1;
  std::uint32_t workers = 1;
  Mode mode = Mode::Local;
  double sample_fraction = 0.01;
  geom::TimeUnit time_unit = geom::TimeUnit::Days;
};

struct IndexedCylinder {
  geom::STCylinder cyl;
  std::uint32_t center_index = 0;
};

/// One unit of work: the points of a partition plus every query cylinder
/// whose volume intersects the partition's envelope.
struct TaskData {
  std::uint32_t task_id = 0;
  std::vector<index::IndexedPoint> points;
  std::vector<IndexedCylinder> cylinders;
};

struct PartialResult {
  std::uint32_t task_id = 0;
  std::uint32_t worker_id = 0;
  std::vector<double> histogram;  // cells_s * cells_t, pre-cumulative
  std::uint64_t pair_comparisons = 0;
  std::uint64_t in_threshold_pairs = 0;
  // Cumulative snapshot of the executing worker's cache.
  cache::TableStats spatial_cache;
  cache::TableStats temporal_cache;
};

struct RunTelemetry {
  std::uint64_t pair_comparisons = 0;
  std::uint64_t in_threshold_pairs = 0;
  std::uint64_t cylinder_assignments = 0;  // redundancy total over all replicates
  std::uint64_t partition_count = 0;
  std::vector<std::uint64_t> partition_point_counts;
  cache::TableStats spatial_cache;
  cache::TableStats temporal_cache;
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  double plan_seconds = 0.0;
  double estimation_seconds = 0.0;
  double simulation_seconds = 0.0;
};

/// Partition assignment: a KDB tree built from a sample, or the hash
/// baseline where every cylinder is replicated to every partition.
struct JobPlan {
  PartitionerChoice choice = PartitionerChoice::Kdb;
  std::uint32_t partitions = 1;
  std::optional<part::KDBPartitioner> kdb;

  std::uint32_t locate(const geom::STPoint& p, std::uint32_t record_index) const;
  std::vector<std::uint32_t> assign(const geom::STCylinder& cyl) const;
};

JobPlan build_plan(std::span<const geom::STPoint> points,
                   const geom::StudyRegion& region, const JobSpec& spec);

/// Distribute a dataset over the plan's partitions: every point to the task
/// owning its leaf, every point's query cylinder (radius s_max, half-height
/// t_max) to every task it intersects. `redundancy_out`, when given, is
/// incremented by the total (cylinder, task) assignment count.
std::vector<TaskData> make_tasks(const JobPlan& plan,
                                 std::span<const geom::STPoint> dataset,
                                 const JobSpec& spec,
                                 std::uint64_t* redundancy_out = nullptr);

PartialResult execute_task(const TaskData& task, const geom::StudyRegion& region,
                           const est::DistanceGrid& grid,
                           const est::EstimatorOptions& options,
                           cache::WeightCache* weight_cache = nullptr);

/// Elementwise-sum partial histograms in task order, cumulative-sum, scale.
est::KSurface aggregate(std::span<const PartialResult> partials, std::size_t n,
                        const geom::StudyRegion& region, const est::DistanceGrid& grid);

/// Task execution backend. Partial results come back ordered by task id so
/// aggregation order never depends on scheduling.
class Executor {
 public:
  virtual ~Executor() = default;
  /// Called once after planning; distributed backends broadcast the encoded
  /// partitioner to their workers here.
  virtual void broadcast_plan(const JobPlan& plan) { (void)plan; }
  virtual std::vector<PartialResult> run(const std::vector<TaskData>& tasks,
                                         bool simulation_phase) = 0;
  virtual void collect_telemetry(RunTelemetry& out) const = 0;
};

/// Multi-threaded in-process executor; one weight cache per worker thread,
/// tasks assigned round-robin by task id.
class LocalExecutor : public Executor {
 public:
  LocalExecutor(std::uint32_t workers, const geom::StudyRegion& region,
                const est::DistanceGrid& grid, const est::EstimatorOptions& options);

  std::vector<PartialResult> run(const std::vector<TaskData>& tasks,
                                 bool simulation_phase) override;
  void collect_telemetry(RunTelemetry& out) const override;

 private:
  std::uint32_t workers_;
  const geom::StudyRegion& region_;
  est::DistanceGrid grid_;
  est::EstimatorOptions options_;
  std::vector<std::unique_ptr<cache::WeightCache>> caches_;
};

struct RunResult {
  est::KSurface k_hat;
  est::KSurface l_hat;
  est::KSurface theoretical;
  std::optional<est::KSurface> upper_l;
  std::optional<est::KSurface> lower_l;
  std::optional<est::KSurface> diff_upper;
  RunTelemetry telemetry;
};

/// Full pipeline: plan, estimate, simulate, envelope. Simulation replicate r
/// uses seed spec.seed + r; workers freeze their caches before the first
/// simulation task.
RunResult run_job(std::span<const geom::STPoint> points,
                  const geom::StudyRegion& region, const JobSpec& spec,
                  Executor& executor);

/// Performance ratios; both operands must be > 0.
double speedup_factor(double t_original, double t_optimized);
double acceleration_factor(double t_standalone, double t_distributed);

}  // namespace stripley::rt
