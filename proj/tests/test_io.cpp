#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "helpers.hpp"
#include "stripley/io.hpp"

using namespace stripley;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& contents) {
  const auto path = fs::temp_directory_path() / ("stripley_io_" + name);
  std::ofstream out(path);
  out << contents;
  return path;
}

}  // namespace

TEST_CASE("time unit names") {
  CHECK(io::parse_time_unit("days") == geom::TimeUnit::Days);
  CHECK(io::parse_time_unit("seconds") == geom::TimeUnit::Seconds);
  CHECK(io::parse_time_unit("months") == geom::TimeUnit::Months);
  CHECK_THROWS_AS(io::parse_time_unit("fortnights"), io::DataError);
  for (auto u : {geom::TimeUnit::Seconds, geom::TimeUnit::Minutes, geom::TimeUnit::Hours,
                 geom::TimeUnit::Days, geom::TimeUnit::Months})
    CHECK(io::parse_time_unit(io::time_unit_name(u)) == u);
}

TEST_CASE("timestamps: integers pass through, ISO dates convert") {
  CHECK(io::parse_timestamp("12345", geom::TimeUnit::Days) == 12345);
  CHECK(io::parse_timestamp("-7", geom::TimeUnit::Hours) == -7);
  // 1970-01-01 is day 0 of the epoch.
  CHECK(io::parse_timestamp("1970-01-01", geom::TimeUnit::Days) == 0);
  CHECK(io::parse_timestamp("1970-01-02", geom::TimeUnit::Days) == 1);
  CHECK(io::parse_timestamp("1969-12-31", geom::TimeUnit::Days) == -1);
  CHECK(io::parse_timestamp("2000-03-01", geom::TimeUnit::Days) == 11017);
  CHECK(io::parse_timestamp("1970-01-02", geom::TimeUnit::Hours) == 24);
  CHECK(io::parse_timestamp("1970-01-02", geom::TimeUnit::Seconds) == 86400);
  // 30-day months.
  CHECK(io::parse_timestamp("1970-01-31", geom::TimeUnit::Months) == 1);
  CHECK_THROWS_AS(io::parse_timestamp("not-a-date", geom::TimeUnit::Days), io::DataError);
  CHECK_THROWS_AS(io::parse_timestamp("1970-13-01", geom::TimeUnit::Days), io::DataError);
}

TEST_CASE("points CSV loading") {
  const auto path = temp_file("pts.csv",
                              "id,x,y,t\n"
                              "a,100.5,200.25,3\n"
                              "b,1,2,1970-01-05\n"
                              "c,-5,0,0\n");
  const auto ds = io::load_points_csv(path.string(), geom::TimeUnit::Days);
  REQUIRE(ds.points.size() == 3);
  CHECK(ds.ids == std::vector<std::string>{"a", "b", "c"});
  CHECK(ds.points[0].x == 100.5);
  CHECK(ds.points[0].y == 200.25);
  CHECK(ds.points[0].start_time == 3);
  CHECK(ds.points[1].start_time == 4);  // ISO date converted
  CHECK(ds.points[2].x == -5.0);

  const auto bad_header = temp_file("badh.csv", "x,y,t\n1,2,3\n");
  CHECK_THROWS_AS(io::load_points_csv(bad_header.string(), geom::TimeUnit::Days),
                  io::DataError);

  const auto bad_row = temp_file("badr.csv", "id,x,y,t\na,1,2,3\nb,oops,2,3\n");
  try {
    io::load_points_csv(bad_row.string(), geom::TimeUnit::Days);
    FAIL("expected DataError");
  } catch (const io::DataError& e) {
    // Line numbers in diagnostics: the broken row is line 3.
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }

  const auto empty = temp_file("empty.csv", "id,x,y,t\n");
  CHECK_THROWS_AS(io::load_points_csv(empty.string(), geom::TimeUnit::Days),
                  io::DataError);
}

TEST_CASE("boundary loading: WKT") {
  const auto wkt =
      temp_file("ring.wkt", "POLYGON((0 0, 1000 0, 1000 500, 0 500, 0 0))");
  const auto ring = io::load_boundary(wkt.string());
  REQUIRE(ring.size() == 4);  // closing vertex stripped
  CHECK(ring[2].x == 1000.0);
  CHECK(ring[2].y == 500.0);

  const auto holed = temp_file(
      "holed.wkt", "POLYGON((0 0, 10 0, 10 10, 0 10, 0 0), (2 2, 3 2, 3 3, 2 2))");
  CHECK_THROWS_AS(io::load_boundary(holed.string()), io::DataError);
  const auto garbage = temp_file("garbage.wkt", "LINESTRING(0 0, 1 1)");
  CHECK_THROWS_AS(io::load_boundary(garbage.string()), io::DataError);
}

TEST_CASE("boundary loading: GeoJSON") {
  const auto gj = temp_file("ring.geojson", R"({
    "type": "Polygon",
    "coordinates": [[[0,0],[2000,0],[2000,1000],[0,1000],[0,0]]]
  })");
  const auto ring = io::load_boundary(gj.string());
  REQUIRE(ring.size() == 4);
  CHECK(ring[1].x == 2000.0);

  const auto feature = temp_file("feature.geojson", R"({
    "type": "Feature",
    "properties": {},
    "geometry": {"type": "Polygon",
                 "coordinates": [[[0,0],[5,0],[5,5],[0,5],[0,0]]]}
  })");
  CHECK(io::load_boundary(feature.string()).size() == 4);

  const auto not_polygon = temp_file("pt.geojson",
                                     R"({"type":"Point","coordinates":[1,2]})");
  CHECK_THROWS_AS(io::load_boundary(not_polygon.string()), io::DataError);
}

TEST_CASE("report JSON carries the documented schema") {
  rng::Engine eng(9);
  const auto region = testutil::square_region(1000.0);
  const auto pts = testutil::uniform_points(eng, region, 60);
  rt::JobSpec spec;
  spec.grid = est::DistanceGrid::regular(200.0, 600.0, 20, 60);
  spec.sims = 3;
  spec.method = sim::Method::Permutation;
  rt::LocalExecutor exec(1, region, spec.grid, spec.options);
  const auto result = rt::run_job(pts, region, spec, exec);

  io::RunParams params;
  params.sims = spec.sims;
  const auto text = io::build_report_json(params, spec, result);
  const auto doc = nlohmann::json::parse(text);
  CHECK(doc.contains("params"));
  CHECK(doc["grid"]["s"].size() == spec.grid.cells_s());
  CHECK(doc["grid"]["t"].size() == spec.grid.cells_t());
  for (const char* key : {"k_hat", "l_hat", "theoretical_k", "diff_upper"}) {
    REQUIRE(doc.contains(key));
    CHECK(doc[key].size() == spec.grid.cells_s());
    CHECK(doc[key][0].size() == spec.grid.cells_t());
  }
  CHECK(doc["envelope"]["upper_l"].size() == spec.grid.cells_s());
  CHECK(doc["envelope"]["lower_l"].size() == spec.grid.cells_s());
  CHECK(doc.contains("telemetry"));
  CHECK(doc["k_hat"][0][0].get<double>() == result.k_hat.values[0][0]);

  // Without simulations, the envelope keys disappear.
  spec.sims = 0;
  rt::LocalExecutor exec2(1, region, spec.grid, spec.options);
  const auto plain = rt::run_job(pts, region, spec, exec2);
  const auto doc2 = nlohmann::json::parse(io::build_report_json(params, spec, plain));
  CHECK(!doc2.contains("envelope"));
  CHECK(!doc2.contains("diff_upper"));
}

TEST_CASE("surface CSV export shapes") {
  rng::Engine eng(10);
  const auto region = testutil::square_region(500.0);
  const auto pts = testutil::uniform_points(eng, region, 40);
  rt::JobSpec spec;
  spec.grid = est::DistanceGrid::regular(100.0, 300.0, 25, 50);
  spec.sims = 2;
  spec.method = sim::Method::Bootstrap;
  rt::LocalExecutor exec(1, region, spec.grid, spec.options);
  const auto result = rt::run_job(pts, region, spec, exec);

  const auto dir = fs::temp_directory_path() / "stripley_io_csvdir";
  fs::create_directories(dir);
  io::write_surface_csvs(dir.string(), result);
  for (const char* name : {"k_hat.csv", "l_hat.csv", "theoretical_k.csv",
                           "upper_l.csv", "lower_l.csv", "diff_upper.csv"}) {
    const auto p = dir / name;
    REQUIRE(fs::exists(p));
    std::ifstream in(p);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      CHECK(std::count(line.begin(), line.end(), ',') == spec.grid.cells_t() - 1);
      ++rows;
    }
    CHECK(rows == spec.grid.cells_s());
  }
}
