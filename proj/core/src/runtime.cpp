#include "stripley/runtime.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "stripley/edge_correction.hpp"

namespace stripley::rt {

std::uint32_t JobPlan::locate(const geom::STPoint& p, std::uint32_t record_index) const {
  if (choice == PartitionerChoice::Hash) return part::hash_assign(record_index, partitions);
  return static_cast<std::uint32_t>(kdb->locate(p));
}

std::vector<std::uint32_t> JobPlan::assign(const geom::STCylinder& cyl) const {
  if (choice == PartitionerChoice::Hash) {
    std::vector<std::uint32_t> all(partitions);
    for (std::uint32_t i = 0; i < partitions; ++i) all[i] = i;
    return all;
  }
  std::vector<std::uint32_t> out;
  for (std::int64_t id : kdb->assign_cylinder(cyl))
    out.push_back(static_cast<std::uint32_t>(id));
  return out;
}

JobPlan build_plan(std::span<const geom::STPoint> points,
                   const geom::StudyRegion& region, const JobSpec& spec) {
  if (spec.partitions < 1) throw std::invalid_argument("partitions must be >= 1");
  JobPlan plan;
  plan.choice = spec.partitioner;
  plan.partitions = spec.partitions;
  if (spec.partitioner == PartitionerChoice::Kdb) {
    const auto sample = part::sample_points(points, spec.sample_fraction, spec.seed);
    // Leaf capacity sized so the leaf count lands near the requested
    // partition count.
    const std::size_t max_items = std::max<std::size_t>(
        1, (sample.size() + spec.partitions - 1) / spec.partitions);
    plan.kdb = part::KDBPartitioner::build(sample, region.bounding_envelope(), max_items);
    plan.partitions = static_cast<std::uint32_t>(plan.kdb->leaf_count());
  }
  return plan;
}

std::vector<TaskData> make_tasks(const JobPlan& plan,
                                 std::span<const geom::STPoint> dataset,
                                 const JobSpec& spec, std::uint64_t* redundancy_out) {
  std::vector<TaskData> tasks(plan.partitions);
  for (std::uint32_t t = 0; t < plan.partitions; ++t) tasks[t].task_id = t;

  std::uint64_t redundancy = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto idx = static_cast<std::uint32_t>(i);
    tasks[plan.locate(dataset[i], idx)].points.push_back({dataset[i], idx});

    geom::STCylinder cyl;
    cyl.center = dataset[i];
    cyl.spatial_radius = spec.grid.s_max();
    cyl.temporal_radius = spec.grid.t_max();
    cyl.temporal_unit = spec.time_unit;
    for (std::uint32_t t : plan.assign(cyl)) {
      tasks[t].cylinders.push_back({cyl, idx});
      ++redundancy;
    }
  }
  if (redundancy_out) *redundancy_out += redundancy;
  return tasks;
}

PartialResult execute_task(const TaskData& task, const geom::StudyRegion& region,
                           const est::DistanceGrid& grid,
                           const est::EstimatorOptions& options,
                           cache::WeightCache* weight_cache) {
  PartialResult partial;
  partial.task_id = task.task_id;
  est::PairHistogram hist(grid.cells_s(), grid.cells_t());

  auto add_pair = [&](const geom::STPoint& center, const geom::STPoint& neighbor) {
    const double d = geom::spatial_distance(center, neighbor);
    const std::int64_t u = geom::temporal_distance(center, neighbor);
    const auto bin = est::bin_pair(grid, d, u);
    if (!bin) return;
    const double w = edge::pair_weight(center, d, u, region, weight_cache);
    hist.add(bin->first, bin->second, 1.0 / w);
    ++partial.in_threshold_pairs;
  };

  if (options.use_index && !task.points.empty()) {
    const auto tree = index::STRTree::build(task.points, options.node_capacity);
    index::QueryStats stats;
    for (const auto& assigned : task.cylinders) {
      for (const auto& item : tree.range_query(assigned.cyl, &stats)) {
        if (item.record_index == assigned.center_index) continue;
        add_pair(assigned.cyl.center, item.pt);
      }
    }
    partial.pair_comparisons = stats.candidate_comparisons;
  } else {
    for (const auto& assigned : task.cylinders) {
      for (const auto& item : task.points) {
        if (item.record_index == assigned.center_index) continue;
        ++partial.pair_comparisons;
        if (geom::within_cylinder(assigned.cyl, item.pt))
          add_pair(assigned.cyl.center, item.pt);
      }
    }
  }
  partial.histogram.assign(hist.flat().begin(), hist.flat().end());
  if (weight_cache) {
    partial.spatial_cache = weight_cache->spatial_stats();
    partial.temporal_cache = weight_cache->temporal_stats();
  }
  return partial;
}

est::KSurface aggregate(std::span<const PartialResult> partials, std::size_t n,
                        const geom::StudyRegion& region,
                        const est::DistanceGrid& grid) {
  est::PairHistogram hist(grid.cells_s(), grid.cells_t());
  std::vector<const PartialResult*> ordered;
  ordered.reserve(partials.size());
  for (const auto& p : partials) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(),
            [](const PartialResult* a, const PartialResult* b) {
              return a->task_id < b->task_id;
            });
  for (const auto* p : ordered) {
    if (p->histogram.size() != grid.cells_s() * grid.cells_t())
      throw std::invalid_argument("partial histogram dimension mismatch");
    hist.add_flat(p->histogram);
  }
  return est::finalize_surface(hist, n, region, grid);
}

LocalExecutor::LocalExecutor(std::uint32_t workers, const geom::StudyRegion& region,
                             const est::DistanceGrid& grid,
                             const est::EstimatorOptions& options)
    : workers_(std::max<std::uint32_t>(1, workers)), region_(region), grid_(grid),
      options_(options) {
  for (std::uint32_t w = 0; w < workers_; ++w) {
    caches_.push_back(options_.use_cache
                          ? std::make_unique<cache::WeightCache>(
                                options_.coord_tolerance, options_.dist_tolerance)
                          : nullptr);
  }
}

std::vector<PartialResult> LocalExecutor::run(const std::vector<TaskData>& tasks,
                                              bool simulation_phase) {
  if (simulation_phase) {
    for (auto& c : caches_)
      if (c) c->freeze();
  }
  std::vector<PartialResult> partials(tasks.size());
  std::vector<std::thread> threads;
  const std::uint32_t active = std::min<std::uint32_t>(
      workers_, static_cast<std::uint32_t>(std::max<std::size_t>(1, tasks.size())));
  for (std::uint32_t w = 0; w < active; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t t = w; t < tasks.size(); t += workers_) {
        partials[t] =
            execute_task(tasks[t], region_, grid_, options_, caches_[w].get());
        partials[t].worker_id = w;
      }
    });
  }
  for (auto& th : threads) th.join();
  return partials;
}

void LocalExecutor::collect_telemetry(RunTelemetry& out) const {
  for (const auto& c : caches_) {
    if (!c) continue;
    out.spatial_cache += c->spatial_stats();
    out.temporal_cache += c->temporal_stats();
  }
}

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

RunResult run_job(std::span<const geom::STPoint> points,
                  const geom::StudyRegion& region, const JobSpec& spec,
                  Executor& executor) {
  spec.grid.validate();
  if (points.size() < 2) throw std::invalid_argument("K estimation needs n >= 2");
  for (const auto& p : points) {
    if (!region.contains(p))
      throw std::invalid_argument("point outside study region or period");
  }

  RunResult result;
  auto t0 = std::chrono::steady_clock::now();
  const JobPlan plan = build_plan(points, region, spec);
  result.telemetry.plan_seconds = seconds_since(t0);
  result.telemetry.partition_count = plan.partitions;
  executor.broadcast_plan(plan);

  auto accumulate = [&](const std::vector<PartialResult>& partials) {
    for (const auto& p : partials) {
      result.telemetry.pair_comparisons += p.pair_comparisons;
      result.telemetry.in_threshold_pairs += p.in_threshold_pairs;
    }
  };

  t0 = std::chrono::steady_clock::now();
  const auto tasks = make_tasks(plan, points, spec, &result.telemetry.cylinder_assignments);
  result.telemetry.partition_point_counts.assign(plan.partitions, 0);
  for (const auto& task : tasks)
    result.telemetry.partition_point_counts[task.task_id] = task.points.size();
  const auto partials = executor.run(tasks, false);
  accumulate(partials);
  result.k_hat = aggregate(partials, points.size(), region, spec.grid);
  result.l_hat = est::to_l(result.k_hat);
  result.theoretical = est::theoretical_surface(spec.grid);
  result.telemetry.estimation_seconds = seconds_since(t0);

  if (spec.sims > 0) {
    t0 = std::chrono::steady_clock::now();
    std::vector<est::KSurface> sim_surfaces;
    sim_surfaces.reserve(spec.sims);
    for (std::uint32_t r = 0; r < spec.sims; ++r) {
      const auto sim_points = sim::generate(spec.method, points.size(), points, region,
                                            spec.seed + r);
      const auto sim_tasks =
          make_tasks(plan, sim_points, spec, &result.telemetry.cylinder_assignments);
      const auto sim_partials = executor.run(sim_tasks, true);
      accumulate(sim_partials);
      sim_surfaces.push_back(
          est::to_l(aggregate(sim_partials, sim_points.size(), region, spec.grid)));
    }
    auto [upper, lower] = sim::envelopes(sim_surfaces);
    result.diff_upper = est::diff_surface(result.l_hat, upper);
    result.upper_l = std::move(upper);
    result.lower_l = std::move(lower);
    result.telemetry.simulation_seconds = seconds_since(t0);
  }

  executor.collect_telemetry(result.telemetry);
  return result;
}

double speedup_factor(double t_original, double t_optimized) {
  if (!(t_original > 0.0) || !(t_optimized > 0.0))
    throw std::invalid_argument("times must be > 0");
  return t_original / t_optimized;
}

double acceleration_factor(double t_standalone, double t_distributed) {
  return speedup_factor(t_standalone, t_distributed);
}

}  // namespace stripley::rt
