#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "stripley/codec.hpp"
#include "stripley/edge_correction.hpp"
#include "stripley/estimator.hpp"
#include "stripley/geometry.hpp"
#include "stripley/rng.hpp"
#include "stripley/st_index.hpp"
#include "stripley/weight_cache.hpp"

namespace {

using namespace stripley;

geom::StudyRegion square_region(double side, std::int64_t duration) {
  return geom::StudyRegion({{0.0, 0.0}, {side, 0.0}, {side, side}, {0.0, side}}, 0,
                           duration);
}

// Circle approximated by a polygon; vertex count drives the per-weight cost.
geom::StudyRegion circle_region(double radius, std::size_t vertices,
                                std::int64_t duration) {
  std::vector<geom::PlanarPoint> ring;
  ring.reserve(vertices);
  for (std::size_t i = 0; i < vertices; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) /
                     static_cast<double>(vertices);
    ring.push_back({radius + radius * std::cos(a), radius + radius * std::sin(a)});
  }
  return geom::StudyRegion(std::move(ring), 0, duration);
}

std::vector<geom::STPoint> uniform_points(const geom::StudyRegion& region,
                                          std::size_t n, std::uint64_t seed) {
  rng::Engine eng(seed);
  const auto env = region.bounding_envelope();
  std::vector<geom::STPoint> out;
  out.reserve(n);
  while (out.size() < n) {
    const geom::STPoint p = geom::make_point(
        eng.uniform(env.x_min, env.x_max), eng.uniform(env.y_min, env.y_max),
        eng.uniform_int(region.period_start(), region.period_end()));
    if (region.contains(p)) out.push_back(p);
  }
  return out;
}

// --- Codec ------------------------------------------------------------

void BM_EncodePoint(benchmark::State& state) {
  const auto p = geom::make_point(1234.5, 6789.0, 42);
  for (auto _ : state) benchmark::DoNotOptimize(codec::encode_point(p));
}
BENCHMARK(BM_EncodePoint);

void BM_DecodePoint(benchmark::State& state) {
  const auto bytes = codec::encode_point(geom::make_point(1234.5, 6789.0, 42));
  for (auto _ : state) benchmark::DoNotOptimize(codec::decode_point(bytes));
}
BENCHMARK(BM_DecodePoint);

void BM_EncodeTree(benchmark::State& state) {
  const auto region = square_region(10000.0, 1000);
  const auto pts = uniform_points(region, static_cast<std::size_t>(state.range(0)), 1);
  std::vector<index::IndexedPoint> indexed;
  for (std::size_t i = 0; i < pts.size(); ++i)
    indexed.push_back({pts[i], static_cast<std::uint32_t>(i)});
  const auto tree = index::STRTree::build(std::move(indexed), 16);
  for (auto _ : state) benchmark::DoNotOptimize(codec::encode_tree(tree));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncodeTree)->Arg(1000)->Arg(10000);

void BM_DecodeTree(benchmark::State& state) {
  const auto region = square_region(10000.0, 1000);
  const auto pts = uniform_points(region, static_cast<std::size_t>(state.range(0)), 1);
  std::vector<index::IndexedPoint> indexed;
  for (std::size_t i = 0; i < pts.size(); ++i)
    indexed.push_back({pts[i], static_cast<std::uint32_t>(i)});
  const auto bytes = codec::encode_tree(index::STRTree::build(std::move(indexed), 16));
  for (auto _ : state) benchmark::DoNotOptimize(codec::decode_strtree(bytes));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DecodeTree)->Arg(1000)->Arg(10000);

// --- Spatiotemporal index ----------------------------------------------

void BM_STRTreeBuild(benchmark::State& state) {
  const auto region = square_region(10000.0, 1000);
  const auto pts = uniform_points(region, static_cast<std::size_t>(state.range(0)), 2);
  std::vector<index::IndexedPoint> indexed;
  for (std::size_t i = 0; i < pts.size(); ++i)
    indexed.push_back({pts[i], static_cast<std::uint32_t>(i)});
  for (auto _ : state) {
    auto copy = indexed;
    benchmark::DoNotOptimize(index::STRTree::build(std::move(copy), 16));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_STRTreeBuild)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_STRTreeQuery(benchmark::State& state) {
  const auto region = square_region(10000.0, 1000);
  const auto pts = uniform_points(region, static_cast<std::size_t>(state.range(0)), 3);
  std::vector<index::IndexedPoint> indexed;
  for (std::size_t i = 0; i < pts.size(); ++i)
    indexed.push_back({pts[i], static_cast<std::uint32_t>(i)});
  const auto tree = index::STRTree::build(std::move(indexed), 16);
  std::size_t q = 0;
  for (auto _ : state) {
    const geom::STCylinder cyl{pts[q % pts.size()], 500.0, 50};
    benchmark::DoNotOptimize(tree.range_query(cyl, nullptr));
    ++q;
  }
}
BENCHMARK(BM_STRTreeQuery)->Arg(10000)->Arg(100000);

// --- Edge-correction weights --------------------------------------------

void BM_SpatialWeightUncached(benchmark::State& state) {
  const auto region =
      circle_region(5000.0, static_cast<std::size_t>(state.range(0)), 100);
  const auto pts = uniform_points(region, 512, 4);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& p = pts[i % pts.size()];
    benchmark::DoNotOptimize(
        edge::spatial_isotropic_weight({p.x, p.y}, 1500.0, region));
    ++i;
  }
}
BENCHMARK(BM_SpatialWeightUncached)->Arg(64)->Arg(512)->Arg(2048);

void BM_SpatialWeightCached(benchmark::State& state) {
  const auto region =
      circle_region(5000.0, static_cast<std::size_t>(state.range(0)), 100);
  const auto pts = uniform_points(region, 512, 4);
  cache::WeightCache wc;
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& p = pts[i % pts.size()];
    benchmark::DoNotOptimize(wc.get_or_compute_spatial(p.x, p.y, 1500.0, [&] {
      return edge::spatial_isotropic_weight({p.x, p.y}, 1500.0, region);
    }));
    ++i;
  }
}
BENCHMARK(BM_SpatialWeightCached)->Arg(64)->Arg(512)->Arg(2048);

// --- Point-in-polygon ----------------------------------------------------

void BM_PointInPolygon(benchmark::State& state) {
  const auto region =
      circle_region(5000.0, static_cast<std::size_t>(state.range(0)), 100);
  const auto& ring = region.boundary();
  rng::Engine eng(5);
  std::vector<geom::PlanarPoint> probes;
  for (int i = 0; i < 1024; ++i)
    probes.push_back({eng.uniform(0.0, 10000.0), eng.uniform(0.0, 10000.0)});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(geom::point_in_polygon(probes[i % probes.size()], ring));
    ++i;
  }
}
BENCHMARK(BM_PointInPolygon)->Arg(16)->Arg(128)->Arg(1024);

// --- Full estimation pass -------------------------------------------------

void BM_EstimateSurface(benchmark::State& state) {
  const auto region = square_region(10000.0, 1000);
  const auto pts = uniform_points(region, static_cast<std::size_t>(state.range(0)), 6);
  const auto grid = est::DistanceGrid::regular(250.0, 1000.0, 25, 100);
  est::EstimatorOptions opt;
  opt.use_cache = true;
  for (auto _ : state) {
    cache::WeightCache wc;
    benchmark::DoNotOptimize(est::estimate_surface(pts, region, grid, opt, &wc));
  }
}
BENCHMARK(BM_EstimateSurface)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
