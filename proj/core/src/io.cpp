#include "stripley/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace stripley::io {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// days_from_civil (Howard Hinnant's algorithm): days since 1970-01-01.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

geom::TimeUnit parse_time_unit(const std::string& name) {
  if (name == "seconds") return geom::TimeUnit::Seconds;
  if (name == "minutes") return geom::TimeUnit::Minutes;
  if (name == "hours") return geom::TimeUnit::Hours;
  if (name == "days") return geom::TimeUnit::Days;
  if (name == "months") return geom::TimeUnit::Months;
  throw DataError("unknown time unit: " + name);
}

std::string time_unit_name(geom::TimeUnit unit) {
  switch (unit) {
    case geom::TimeUnit::Seconds: return "seconds";
    case geom::TimeUnit::Minutes: return "minutes";
    case geom::TimeUnit::Hours: return "hours";
    case geom::TimeUnit::Days: return "days";
    case geom::TimeUnit::Months: return "months";
  }
  return "days";
}

std::int64_t parse_timestamp(const std::string& field, geom::TimeUnit unit) {
  const std::string s = trim(field);
  if (s.size() == 10 && s[4] == '-' && s[7] == '-') {
    int y, m, d;
    if (std::from_chars(s.data(), s.data() + 4, y).ec != std::errc{} ||
        std::from_chars(s.data() + 5, s.data() + 7, m).ec != std::errc{} ||
        std::from_chars(s.data() + 8, s.data() + 10, d).ec != std::errc{} ||
        m < 1 || m > 12 || d < 1 || d > 31) {
      throw DataError("invalid ISO date: " + s);
    }
    const std::int64_t days = days_from_civil(y, static_cast<unsigned>(m),
                                              static_cast<unsigned>(d));
    switch (unit) {
      case geom::TimeUnit::Seconds: return days * 86400;
      case geom::TimeUnit::Minutes: return days * 1440;
      case geom::TimeUnit::Hours: return days * 24;
      case geom::TimeUnit::Days: return days;
      case geom::TimeUnit::Months: return floor_div(days, 30);
    }
  }
  std::int64_t value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw DataError("invalid timestamp: " + s);
  return value;
}

Dataset load_points_csv(const std::string& path, geom::TimeUnit unit) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;

  auto split = [](const std::string& l) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : l) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    fields.push_back(cur);
    return fields;
  };

  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  ++line_no;
  {
    auto header = split(trim(line));
    for (auto& h : header) h = trim(h);
    if (header.size() < 4 || header[0] != "id" || header[1] != "x" ||
        header[2] != "y" || header[3] != "t") {
      throw DataError(path + ":1: expected header id,x,y,t");
    }
  }
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty()) continue;
    const auto fields = split(row);
    const std::string where = path + ":" + std::to_string(line_no);
    if (fields.size() < 4) throw DataError(where + ": expected 4 columns");
    geom::STPoint p;
    try {
      p.x = std::stod(trim(fields[1]));
      p.y = std::stod(trim(fields[2]));
    } catch (const std::exception&) {
      throw DataError(where + ": invalid coordinate");
    }
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw DataError(where + ": coordinate not finite");
    try {
      p.start_time = p.end_time = parse_timestamp(fields[3], unit);
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    ds.ids.push_back(trim(fields[0]));
    ds.points.push_back(p);
  }
  if (ds.points.empty()) throw DataError(path + ": no data rows");
  return ds;
}

namespace {

std::vector<geom::PlanarPoint> parse_wkt_polygon(const std::string& text) {
  const auto open = text.find("((");
  const auto close = text.find("))");
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw DataError("malformed WKT POLYGON");
  // Outer ring only; an inner-ring separator would appear before '))'.
  std::string ring_text = text.substr(open + 2, close - open - 2);
  if (ring_text.find('(') != std::string::npos)
    throw DataError("polygon holes are not supported");
  std::vector<geom::PlanarPoint> ring;
  std::stringstream ss(ring_text);
  std::string pair;
  while (std::getline(ss, pair, ',')) {
    std::stringstream ps(trim(pair));
    geom::PlanarPoint v;
    if (!(ps >> v.x >> v.y)) throw DataError("malformed WKT coordinate: " + pair);
    ring.push_back(v);
  }
  return ring;
}

std::vector<geom::PlanarPoint> parse_geojson_polygon(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw DataError(std::string("invalid GeoJSON: ") + e.what());
  }
  if (j.contains("geometry")) j = j["geometry"];  // allow a Feature wrapper
  if (!j.contains("type") || j["type"] != "Polygon" || !j.contains("coordinates"))
    throw DataError("GeoJSON boundary must be a Polygon");
  const auto& rings = j["coordinates"];
  if (!rings.is_array() || rings.empty())
    throw DataError("GeoJSON polygon has no rings");
  if (rings.size() > 1) throw DataError("polygon holes are not supported");
  std::vector<geom::PlanarPoint> ring;
  for (const auto& v : rings[0]) {
    if (!v.is_array() || v.size() < 2) throw DataError("malformed GeoJSON vertex");
    ring.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  return ring;
}

}  // namespace

std::vector<geom::PlanarPoint> load_boundary(const std::string& path) {
  const std::string text = trim(read_file(path));
  if (text.empty()) throw DataError(path + ": empty boundary file");
  std::vector<geom::PlanarPoint> ring;
  if (text.rfind("POLYGON", 0) == 0) {
    ring = parse_wkt_polygon(text);
  } else if (text.front() == '{') {
    ring = parse_geojson_polygon(text);
  } else {
    throw DataError(path + ": boundary must be WKT POLYGON or GeoJSON Polygon");
  }
  if (ring.size() >= 2 && ring.front().x == ring.back().x &&
      ring.front().y == ring.back().y) {
    ring.pop_back();
  }
  if (ring.size() < 3) throw DataError(path + ": polygon needs >= 3 vertices");
  return ring;
}

namespace {

ordered_json surface_matrix(const est::KSurface& surf) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : surf.values) rows.push_back(row);
  return rows;
}

}  // namespace

std::string build_report_json(const RunParams& params, const rt::JobSpec& spec,
                              const rt::RunResult& result) {
  ordered_json j;
  j["params"] = {
      {"points", params.points_path},
      {"boundary", params.boundary_path},
      {"time_unit", params.time_unit},
      {"smax", spec.grid.s_max()},
      {"tmax", spec.grid.t_max()},
      {"sims", params.sims},
      {"sim_method", params.sim_method},
      {"seed", params.seed},
      {"index", params.use_index ? "on" : "off"},
      {"cache", params.use_cache ? "on" : "off"},
      {"coord_tol", params.coord_tolerance},
      {"dist_tol", params.dist_tolerance},
      {"partitioner", params.partitioner},
      {"partitions", params.partitions},
      {"workers", params.workers},
      {"mode", params.mode},
  };
  j["grid"] = {{"s", result.k_hat.grid.s_values}, {"t", result.k_hat.grid.t_values}};
  j["k_hat"] = surface_matrix(result.k_hat);
  j["l_hat"] = surface_matrix(result.l_hat);
  j["theoretical_k"] = surface_matrix(result.theoretical);
  if (result.upper_l && result.lower_l) {
    j["envelope"] = {{"upper_l", surface_matrix(*result.upper_l)},
                     {"lower_l", surface_matrix(*result.lower_l)}};
    j["diff_upper"] = surface_matrix(*result.diff_upper);
  }
  const auto& tel = result.telemetry;
  j["telemetry"] = {
      {"timings",
       {{"plan_seconds", tel.plan_seconds},
        {"estimation_seconds", tel.estimation_seconds},
        {"simulation_seconds", tel.simulation_seconds}}},
      {"comparisons",
       {{"pair_comparisons", tel.pair_comparisons},
        {"in_threshold_pairs", tel.in_threshold_pairs}}},
      {"cache",
       {{"spatial",
         {{"hits", tel.spatial_cache.hits},
          {"misses", tel.spatial_cache.misses},
          {"insertions", tel.spatial_cache.insertions}}},
        {"temporal",
         {{"hits", tel.temporal_cache.hits},
          {"misses", tel.temporal_cache.misses},
          {"insertions", tel.temporal_cache.insertions}}}}},
      {"redundancy",
       {{"cylinder_assignments", tel.cylinder_assignments},
        {"partitions", tel.partition_count},
        {"partition_point_counts", tel.partition_point_counts}}},
      {"bytes", {{"sent", tel.bytes_sent}, {"received", tel.bytes_received}}},
  };
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << contents;
}

namespace {

void write_matrix_csv(const std::string& path, const est::KSurface& surf) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& row : surf.values) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  write_file(path, out.str());
}

}  // namespace

void write_surface_csvs(const std::string& dir, const rt::RunResult& result) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_matrix_csv((base / "k_hat.csv").string(), result.k_hat);
  write_matrix_csv((base / "l_hat.csv").string(), result.l_hat);
  write_matrix_csv((base / "theoretical_k.csv").string(), result.theoretical);
  if (result.upper_l) write_matrix_csv((base / "upper_l.csv").string(), *result.upper_l);
  if (result.lower_l) write_matrix_csv((base / "lower_l.csv").string(), *result.lower_l);
  if (result.diff_upper)
    write_matrix_csv((base / "diff_upper.csv").string(), *result.diff_upper);
}

}  // namespace stripley::io
