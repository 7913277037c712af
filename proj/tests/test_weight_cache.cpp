#include <doctest.h>

#include <bit>

#include "stripley/weight_cache.hpp"

using namespace stripley;

TEST_CASE("quantize") {
  SUBCASE("tolerance 0 keys on the exact bit pattern") {
    CHECK(cache::quantize(1.5, 0.0) == std::bit_cast<std::int64_t>(1.5));
    CHECK(cache::quantize(0.0, 0.0) != cache::quantize(-0.0, 0.0));  // distinct bits
    CHECK(cache::quantize(3.25, 0.0) == cache::quantize(3.25, 0.0));
  }
  SUBCASE("positive tolerance rounds half away from zero") {
    CHECK(cache::quantize(0.2, 0.1) == 2);
    CHECK(cache::quantize(0.25, 0.1) == 3);    // 2.5 -> 3
    CHECK(cache::quantize(-0.25, 0.1) == -3);  // -2.5 -> -3
    CHECK(cache::quantize(0.24, 0.1) == 2);
    CHECK(cache::quantize(123.4, 1.0) == 123);
  }
  SUBCASE("nearby values share a key under tolerance") {
    CHECK(cache::quantize(10.02, 0.1) == cache::quantize(9.98, 0.1));
    CHECK(cache::quantize(10.02, 0.0) != cache::quantize(9.98, 0.0));
  }
}

TEST_CASE("spatial table hit/miss/insertion accounting") {
  cache::WeightCache wc;
  int computes = 0;
  auto compute = [&] {
    ++computes;
    return 0.75;
  };
  CHECK(wc.get_or_compute_spatial(1.0, 2.0, 3.0, compute) == 0.75);
  CHECK(computes == 1);
  CHECK(wc.spatial_stats().misses == 1);
  CHECK(wc.spatial_stats().insertions == 1);
  CHECK(wc.spatial_stats().hits == 0);

  CHECK(wc.get_or_compute_spatial(1.0, 2.0, 3.0, compute) == 0.75);
  CHECK(computes == 1);  // served from the table
  CHECK(wc.spatial_stats().hits == 1);

  // Different distance under the same center is a distinct entry.
  wc.get_or_compute_spatial(1.0, 2.0, 4.0, [] { return 0.5; });
  CHECK(wc.spatial_stats().insertions == 2);
  CHECK(wc.spatial_entry_count() == 2);
}

TEST_CASE("temporal table accounting") {
  cache::WeightCache wc;
  CHECK(wc.get_or_compute_temporal(10, 3, [] { return 0.5; }) == 0.5);
  CHECK(wc.get_or_compute_temporal(10, 3, [] { return -1.0; }) == 0.5);  // hit wins
  CHECK(wc.temporal_stats().hits == 1);
  CHECK(wc.temporal_stats().misses == 1);
  CHECK(wc.temporal_entry_count() == 1);
}

TEST_CASE("freeze stops insertions but keeps serving hits") {
  cache::WeightCache wc;
  wc.get_or_compute_spatial(0.0, 0.0, 1.0, [] { return 0.25; });
  CHECK(wc.phase() == cache::CachePhase::Estimation);
  wc.freeze();
  wc.freeze();  // idempotent
  CHECK(wc.phase() == cache::CachePhase::Simulation);

  // Pre-freeze entry still hits.
  CHECK(wc.get_or_compute_spatial(0.0, 0.0, 1.0, [] { return -1.0; }) == 0.25);
  CHECK(wc.spatial_stats().hits == 1);

  // New keys are computed every time and never inserted.
  int computes = 0;
  auto compute = [&] {
    ++computes;
    return 0.5;
  };
  wc.get_or_compute_spatial(9.0, 9.0, 1.0, compute);
  wc.get_or_compute_spatial(9.0, 9.0, 1.0, compute);
  CHECK(computes == 2);
  CHECK(wc.spatial_stats().insertions == 1);  // only the pre-freeze one
  CHECK(wc.spatial_entry_count() == 1);

  wc.get_or_compute_temporal(7, 7, [] { return 1.0; });
  CHECK(wc.temporal_stats().insertions == 0);
  CHECK(wc.temporal_entry_count() == 0);
}

TEST_CASE("tolerance collapses mirrored geometry onto one entry") {
  cache::WeightCache wc(/*coord_tolerance=*/1.0, /*dist_tolerance=*/0.5);
  wc.get_or_compute_spatial(100.2, 50.1, 10.1, [] { return 0.9; });
  // Same quantized center and distance: a hit even though doubles differ.
  CHECK(wc.get_or_compute_spatial(99.8, 49.9, 10.2, [] { return -1.0; }) == 0.9);
  CHECK(wc.spatial_stats().hits == 1);
}

TEST_CASE("TableStats accumulate") {
  cache::TableStats a{1, 2, 3}, b{10, 20, 30};
  a += b;
  CHECK(a.hits == 11);
  CHECK(a.misses == 22);
  CHECK(a.insertions == 33);
}
