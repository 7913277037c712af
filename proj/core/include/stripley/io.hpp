#pragma once

#include <string>
#include <vector>

#include "stripley/geometry.hpp"
#include "stripley/runtime.hpp"

namespace stripley::io {

/// Ingest / export failures carry file and line context in what().
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

geom::TimeUnit parse_time_unit(const std::string& name);
std::string time_unit_name(geom::TimeUnit unit);

/// Integer timestamp in the declared unit, or an ISO-8601 date (YYYY-MM-DD)
/// converted to it. "months" are calendar-free 30-day months.
std::int64_t parse_timestamp(const std::string& field, geom::TimeUnit unit);

struct Dataset {
  std::vector<geom::STPoint> points;
  std::vector<std::string> ids;
};

/// CSV with header columns id,x,y,t.
Dataset load_points_csv(const std::string& path, geom::TimeUnit unit);

/// WKT POLYGON or GeoJSON Polygon (outer ring only).
std::vector<geom::PlanarPoint> load_boundary(const std::string& path);

struct RunParams {
  std::string points_path;
  std::string boundary_path;
  std::string time_unit = "days";
  std::string sim_method = "csr";
  std::string partitioner = "kdb";
  std::string mode = "local";
  std::uint32_t sims = 99;
  std::uint64_t seed = 1;
  std::uint32_t partitions = 1;
  std::uint32_t workers = 1;
  bool use_index = false;
  bool use_cache = false;
  double coord_tolerance = 0.0;
  double dist_tolerance = 0.0;
};

/// Serialize a run into the documented result schema. Timings and other
/// non-reproducible values live only under "telemetry".
std::string build_report_json(const RunParams& params, const rt::JobSpec& spec,
                              const rt::RunResult& result);

void write_file(const std::string& path, const std::string& contents);

/// One CSV matrix (c_s rows x c_t columns) per surface into dir/.
void write_surface_csvs(const std::string& dir, const rt::RunResult& result);

}  // namespace stripley::io
