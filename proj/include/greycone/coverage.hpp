#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "greycone/dut.hpp"
#include "greycone/exec.hpp"

namespace greycone {

inline constexpr int kBucketCount = 8;

/// Hit-count class: 1, 2, 3, 4-7, 8-15, 16-31, 32-127, 128+ map to 0..7.
/// Requires raw >= 1.
int bucketize(std::uint32_t raw);

class CoverageMap {
 public:
  CoverageMap() = default;
  explicit CoverageMap(std::size_t edge_count);

  std::size_t edge_count() const { return masks_.size(); }
  std::uint8_t mask(EdgeId e) const { return masks_[e]; }
  bool seen(EdgeId e, int bucket) const { return (masks_[e] >> bucket) & 1u; }
  bool edge_covered(EdgeId e) const { return masks_[e] != 0; }

  /// Cumulative raw hits per edge over all merged runs (LCOV counts).
  std::uint64_t total_hits(EdgeId e) const { return totals_[e]; }

  std::size_t flags_set() const;
  std::size_t covered_branch_edges(const InstrumentedProgram& ip) const;

  /// Number of (edge, bucket) flags `r` would newly set. Does not modify.
  std::size_t count_new(const ExecResult& r) const;

  /// Sets the flags for `r` and returns how many were new.
  std::size_t merge(const ExecResult& r);

  friend bool operator==(const CoverageMap&, const CoverageMap&) = default;

 private:
  void ensure(std::size_t n);

  std::vector<std::uint8_t> masks_;
  std::vector<std::uint64_t> totals_;
};

struct MergeResult {
  CoverageMap map;
  std::size_t new_flags = 0;
};

MergeResult merge_coverage(const CoverageMap& m, const ExecResult& r);

inline bool is_interesting(const ExecResult& r, const CoverageMap& m) {
  return m.count_new(r) > 0;
}

/// Covered branch edges over all branch edges, in percent rounded to 0.1.
/// A program without branches reports 100.
double coverage_pct(const CoverageMap& m, const InstrumentedProgram& ip);

/// Same rounding rule applied to a raw fraction.
double round_pct(std::size_t covered, std::size_t total);

}  // namespace greycone
