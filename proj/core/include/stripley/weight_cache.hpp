#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <utility>

namespace stripley::cache {

enum class CachePhase { Estimation, Simulation };

struct TableStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t insertions = 0;

  TableStats& operator+=(const TableStats& o) {
    hits += o.hits;
    misses += o.misses;
    insertions += o.insertions;
    return *this;
  }
};

/// Quantization key. tolerance == 0 means exact mode: the key is the bit
/// pattern of the value. Otherwise round-half-away-from-zero of value/tolerance
/// so mirrored geometry shares keys.
inline std::int64_t quantize(double value, double tolerance) {
  if (tolerance == 0.0) return std::bit_cast<std::int64_t>(value);
  return std::llround(value / tolerance);
}

/// 2-tier cache of isotropic edge-correction weights. Spatial entries are
/// keyed by quantized center coordinates then quantized pair distance;
/// temporal entries by raw timestamp then raw temporal distance. A cache is
/// owned by a single worker; once frozen (simulation phase) misses are
/// computed but never inserted.
class WeightCache {
 public:
  WeightCache(double coord_tolerance = 0.0, double dist_tolerance = 0.0)
      : coord_tol_(coord_tolerance), dist_tol_(dist_tolerance) {}

  template <class Compute>
  double get_or_compute_spatial(double cx, double cy, double d, Compute&& compute) {
    const CenterKey key{quantize(cx, coord_tol_), quantize(cy, coord_tol_)};
    const std::int64_t dkey = quantize(d, dist_tol_);
    auto outer = spatial_.find(key);
    if (outer != spatial_.end()) {
      auto inner = outer->second.find(dkey);
      if (inner != outer->second.end()) {
        ++spatial_stats_.hits;
        return inner->second;
      }
    }
    ++spatial_stats_.misses;
    const double w = compute();
    if (phase_ == CachePhase::Estimation) {
      spatial_[key][dkey] = w;
      ++spatial_stats_.insertions;
    }
    return w;
  }

  template <class Compute>
  double get_or_compute_temporal(std::int64_t center_t, std::int64_t u,
                                 Compute&& compute) {
    auto outer = temporal_.find(center_t);
    if (outer != temporal_.end()) {
      auto inner = outer->second.find(u);
      if (inner != outer->second.end()) {
        ++temporal_stats_.hits;
        return inner->second;
      }
    }
    ++temporal_stats_.misses;
    const double v = compute();
    if (phase_ == CachePhase::Estimation) {
      temporal_[center_t][u] = v;
      ++temporal_stats_.insertions;
    }
    return v;
  }

  void freeze() { phase_ = CachePhase::Simulation; }  // idempotent
  CachePhase phase() const { return phase_; }

  const TableStats& spatial_stats() const { return spatial_stats_; }
  const TableStats& temporal_stats() const { return temporal_stats_; }
  std::size_t spatial_entry_count() const {
    std::size_t n = 0;
    for (const auto& [k, inner] : spatial_) n += inner.size();
    return n;
  }
  std::size_t temporal_entry_count() const {
    std::size_t n = 0;
    for (const auto& [k, inner] : temporal_) n += inner.size();
    return n;
  }

 private:
  struct CenterKey {
    std::int64_t x;
    std::int64_t y;
    bool operator==(const CenterKey&) const = default;
  };
  struct CenterKeyHash {
    std::size_t operator()(const CenterKey& k) const {
      auto mix = [](std::uint64_t v) {
        v += 0x9e3779b97f4a7c15ULL;
        v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
        v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
        return v ^ (v >> 31);
      };
      return static_cast<std::size_t>(
          mix(static_cast<std::uint64_t>(k.x)) ^
          (mix(static_cast<std::uint64_t>(k.y)) << 1));
    }
  };

  double coord_tol_;
  double dist_tol_;
  CachePhase phase_ = CachePhase::Estimation;
  std::unordered_map<CenterKey, std::unordered_map<std::int64_t, double>, CenterKeyHash>
      spatial_;
  std::unordered_map<std::int64_t, std::unordered_map<std::int64_t, double>> temporal_;
  TableStats spatial_stats_;
  TableStats temporal_stats_;
};

}  // namespace stripley::cache
