// stripley: space-time Ripley's K estimation with simulation envelopes,
// local-parallel and master-worker execution.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stripley/codec.hpp"
#include "stripley/distributed.hpp"
#include "stripley/io.hpp"
#include "stripley/runtime.hpp"

namespace {

using namespace stripley;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

struct RunFlags {
  std::string points_path;
  std::string boundary_path;
  std::string time_unit = "days";
  double smax = 0.0;
  double sstep = 0.0;
  std::int64_t tmax = 0;
  std::int64_t tstep = 0;
  std::uint32_t sims = 99;
  std::string sim_method = "csr";
  std::uint64_t seed = 1;
  std::string index = "off";
  std::string cache = "off";
  double coord_tol = 0.0;
  double dist_tol = 0.0;
  std::string partitioner = "kdb";
  std::uint32_t partitions = 1;
  std::uint32_t workers = 1;
  std::string mode = "local";
  std::string worker_addrs;
  std::string out_path;
  std::string csv_dir;
  bool drop_outside = false;
  bool benchmark = false;
  std::int64_t period_start = 0;
  std::int64_t period_end = 0;
  bool period_start_set = false;
  bool period_end_set = false;
};

sim::Method parse_method(const std::string& name) {
  if (name == "csr") return sim::Method::Cstr;
  if (name == "bootstrap") return sim::Method::Bootstrap;
  if (name == "permutation") return sim::Method::Permutation;
  throw io::DataError("unknown simulation method: " + name);
}

rt::JobSpec make_spec(const RunFlags& flags) {
  rt::JobSpec spec;
  spec.grid = est::DistanceGrid::regular(flags.sstep, flags.smax, flags.tstep, flags.tmax);
  spec.method = parse_method(flags.sim_method);
  spec.sims = flags.sims;
  spec.seed = flags.seed;
  spec.options.use_index = flags.index == "on";
  spec.options.use_cache = flags.cache == "on";
  spec.options.coord_tolerance = flags.coord_tol;
  spec.options.dist_tolerance = flags.dist_tol;
  spec.partitioner = flags.partitioner == "hash" ? rt::PartitionerChoice::Hash
                                                 : rt::PartitionerChoice::Kdb;
  spec.partitions = flags.partitions;
  spec.workers = flags.workers;
  spec.mode = flags.mode == "distributed" ? rt::Mode::Distributed : rt::Mode::Local;
  spec.time_unit = io::parse_time_unit(flags.time_unit);
  return spec;
}

std::vector<dist::Endpoint> worker_endpoints(const RunFlags& flags) {
  std::string addrs = flags.worker_addrs;
  if (addrs.empty()) {
    if (const char* env = std::getenv("STRIPLEY_WORKERS")) addrs = env;
  }
  if (addrs.empty())
    throw io::DataError("distributed mode needs --worker-addrs or STRIPLEY_WORKERS");
  std::vector<dist::Endpoint> endpoints;
  std::stringstream ss(addrs);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) endpoints.push_back(dist::parse_endpoint(item));
  }
  if (endpoints.empty()) throw io::DataError("empty worker address list");
  return endpoints;
}

struct LoadedJob {
  std::vector<geom::STPoint> points;
  geom::StudyRegion region;
};

LoadedJob load_job(const RunFlags& flags) {
  const auto unit = io::parse_time_unit(flags.time_unit);
  auto dataset = io::load_points_csv(flags.points_path, unit);
  auto ring = io::load_boundary(flags.boundary_path);

  std::int64_t t_min = dataset.points.front().start_time;
  std::int64_t t_max = t_min;
  for (const auto& p : dataset.points) {
    t_min = std::min(t_min, p.start_time);
    t_max = std::max(t_max, p.start_time);
  }
  const std::int64_t period_start = flags.period_start_set ? flags.period_start : t_min;
  std::int64_t period_end = flags.period_end_set ? flags.period_end : t_max;
  if (period_end <= period_start) period_end = period_start + 1;

  geom::StudyRegion region(std::move(ring), period_start, period_end);

  std::vector<geom::STPoint> accepted;
  std::vector<std::string> rejected;
  for (std::size_t i = 0; i < dataset.points.size(); ++i) {
    if (region.contains(dataset.points[i])) {
      accepted.push_back(dataset.points[i]);
    } else {
      rejected.push_back(dataset.ids[i]);
    }
  }
  if (!rejected.empty() && !flags.drop_outside) {
    std::ostringstream msg;
    msg << rejected.size() << " point(s) outside study region/period:";
    for (std::size_t i = 0; i < std::min<std::size_t>(rejected.size(), 10); ++i)
      msg << ' ' << rejected[i];
    if (rejected.size() > 10) msg << " ...";
    msg << " (use --drop-outside to drop them)";
    throw io::DataError(msg.str());
  }
  if (!rejected.empty())
    std::cerr << "dropped " << rejected.size() << " point(s) outside region/period\n";
  return LoadedJob{std::move(accepted), std::move(region)};
}

io::RunParams echo_params(const RunFlags& flags) {
  io::RunParams params;
  params.points_path = flags.points_path;
  params.boundary_path = flags.boundary_path;
  params.time_unit = flags.time_unit;
  params.sim_method = flags.sim_method;
  params.partitioner = flags.partitioner;
  params.mode = flags.mode;
  params.sims = flags.sims;
  params.seed = flags.seed;
  params.partitions = flags.partitions;
  params.workers = flags.workers;
  params.use_index = flags.index == "on";
  params.use_cache = flags.cache == "on";
  params.coord_tolerance = flags.coord_tol;
  params.dist_tolerance = flags.dist_tol;
  return params;
}

int run_command(const RunFlags& flags) {
  const auto spec = make_spec(flags);
  const auto job = load_job(flags);

  rt::RunResult result;
  if (spec.mode == rt::Mode::Distributed) {
    dist::DistributedExecutor executor(worker_endpoints(flags), job.region, spec);
    result = rt::run_job(job.points, job.region, spec, executor);
  } else {
    rt::LocalExecutor executor(spec.workers, job.region, spec.grid, spec.options);
    result = rt::run_job(job.points, job.region, spec, executor);
  }

  const std::string report = io::build_report_json(echo_params(flags), spec, result);
  if (flags.out_path.empty()) {
    std::cout << report;
  } else {
    io::write_file(flags.out_path, report);
  }
  if (!flags.csv_dir.empty()) io::write_surface_csvs(flags.csv_dir, result);
  return kExitOk;
}

int benchmark_command(const RunFlags& flags) {
  const auto base_spec = make_spec(flags);
  const auto job = load_job(flags);
  const std::size_t n = job.points.size();

  struct Row {
    std::string name;
    double seconds = 0.0;
    rt::RunTelemetry telemetry;
  };
  std::vector<Row> rows;

  for (const bool index_on : {false, true}) {
    for (const bool cache_on : {false, true}) {
      for (const auto partitioner :
           {rt::PartitionerChoice::Hash, rt::PartitionerChoice::Kdb}) {
        rt::JobSpec spec = base_spec;
        spec.options.use_index = index_on;
        spec.options.use_cache = cache_on;
        spec.partitioner = partitioner;
        rt::LocalExecutor executor(spec.workers, job.region, spec.grid, spec.options);
        const auto t0 = std::chrono::steady_clock::now();
        const auto result = rt::run_job(job.points, job.region, spec, executor);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        Row row;
        row.name = std::string("index=") + (index_on ? "on" : "off") +
                   " cache=" + (cache_on ? "on" : "off") + " partitioner=" +
                   (partitioner == rt::PartitionerChoice::Kdb ? "kdb" : "hash");
        row.seconds = seconds;
        row.telemetry = result.telemetry;
        rows.push_back(std::move(row));
      }
    }
  }

  const double baseline = rows.front().seconds;
  std::printf("n=%zu  grid=%zux%zu  sims=%u\n", n, base_spec.grid.cells_s(),
              base_spec.grid.cells_t(), base_spec.sims);
  std::printf("serialized: point=%zuB envelope=%zuB cylinder=%zuB dataset=%zuB\n",
              codec::kPointBytes, codec::kEnvelopeBytes, codec::kCylinderBytes,
              n * codec::kPointBytes);
  std::printf("%-44s %10s %8s %14s %12s %12s\n", "configuration", "seconds", "SF",
              "comparisons", "cache-hits", "redundancy");
  for (const auto& row : rows) {
    const auto& tel = row.telemetry;
    std::printf("%-44s %10.3f %8.2f %14llu %12llu %12llu\n", row.name.c_str(),
                row.seconds, rt::speedup_factor(baseline, row.seconds),
                static_cast<unsigned long long>(tel.pair_comparisons),
                static_cast<unsigned long long>(tel.spatial_cache.hits +
                                                tel.temporal_cache.hits),
                static_cast<unsigned long long>(tel.cylinder_assignments));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"space-time Ripley's K function toolkit"};
  app.require_subcommand(1);

  RunFlags flags;
  auto* run = app.add_subcommand("run", "estimate K/L surfaces and envelopes");
  run->add_option("--points", flags.points_path, "points CSV (id,x,y,t)")->required();
  run->add_option("--boundary", flags.boundary_path, "WKT or GeoJSON polygon")->required();
  run->add_option("--time-unit", flags.time_unit)
      ->check(CLI::IsMember({"seconds", "minutes", "hours", "days", "months"}));
  run->add_option("--smax", flags.smax, "max spatial distance (m)")->required();
  run->add_option("--sstep", flags.sstep, "spatial step (m)")->required();
  run->add_option("--tmax", flags.tmax, "max temporal distance")->required();
  run->add_option("--tstep", flags.tstep, "temporal step")->required();
  run->add_option("--sims", flags.sims, "number of simulations (0 = none)");
  run->add_option("--sim-method", flags.sim_method)
      ->check(CLI::IsMember({"csr", "bootstrap", "permutation"}));
  run->add_option("--seed", flags.seed);
  run->add_option("--index", flags.index)->check(CLI::IsMember({"on", "off"}));
  run->add_option("--cache", flags.cache)->check(CLI::IsMember({"on", "off"}));
  run->add_option("--coord-tol", flags.coord_tol, "cache coordinate tolerance (m)");
  run->add_option("--dist-tol", flags.dist_tol, "cache distance tolerance (m)");
  run->add_option("--partitioner", flags.partitioner)
      ->check(CLI::IsMember({"kdb", "hash"}));
  run->add_option("--partitions", flags.partitions);
  run->add_option("--workers", flags.workers);
  run->add_option("--mode", flags.mode)->check(CLI::IsMember({"local", "distributed"}));
  run->add_option("--worker-addrs", flags.worker_addrs,
                  "comma-separated host:port list (or STRIPLEY_WORKERS)");
  run->add_option("--out", flags.out_path, "result JSON path (default stdout)");
  run->add_option("--csv-dir", flags.csv_dir, "also write CSV matrices here");
  run->add_flag("--drop-outside", flags.drop_outside,
                "drop points outside the region/period instead of failing");
  run->add_flag("--benchmark", flags.benchmark,
                "run the option matrix and report timings/SF");
  auto* ps = run->add_option("--period-start", flags.period_start);
  auto* pe = run->add_option("--period-end", flags.period_end);

  std::string listen = "127.0.0.1:0";
  int fail_after = -1;
  auto* worker = app.add_subcommand("worker", "serve one master session");
  worker->add_option("--worker-listen", listen, "host:port (port 0 = ephemeral)");
  worker->add_option("--fail-after", fail_after,
                     "test hook: drop the connection after N partial results");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  flags.period_start_set = ps->count() > 0;
  flags.period_end_set = pe->count() > 0;

  try {
    if (worker->parsed()) {
      const auto ep = dist::parse_endpoint(listen);
      dist::WorkerConfig config;
      config.host = ep.host;
      config.port = ep.port;
      config.fail_after_partials = fail_after;
      return dist::serve_worker(config) == 0 ? kExitOk : kExitRuntime;
    }
    return flags.benchmark ? benchmark_command(flags) : run_command(flags);
  } catch (const io::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
