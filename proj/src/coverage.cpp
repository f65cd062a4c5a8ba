#include "greycone/coverage.hpp"

#include <bit>
#include <cmath>

namespace greycone {

int bucketize(std::uint32_t raw) {
  if (raw <= 3) return raw == 0 ? 0 : static_cast<int>(raw) - 1;
  if (raw < 8) return 3;
  if (raw < 16) return 4;
  if (raw < 32) return 5;
  if (raw < 128) return 6;
  return 7;
}

CoverageMap::CoverageMap(std::size_t edge_count)
    : masks_(edge_count, 0), totals_(edge_count, 0) {}

void CoverageMap::ensure(std::size_t n) {
  if (masks_.size() < n) {
    masks_.resize(n, 0);
    totals_.resize(n, 0);
  }
}

std::size_t CoverageMap::flags_set() const {
  std::size_t n = 0;
  for (auto m : masks_) n += static_cast<std::size_t>(std::popcount(m));
  return n;
}

std::size_t CoverageMap::covered_branch_edges(const InstrumentedProgram& ip) const {
  std::size_t n = 0;
  for (EdgeId e = 0; e < masks_.size() && e < ip.edges.size(); ++e) {
    if (masks_[e] && ip.edges[e].is_branch) ++n;
  }
  return n;
}

std::size_t CoverageMap::count_new(const ExecResult& r) const {
  std::size_t n = 0;
  for (std::size_t e = 0; e < r.edge_hits.size(); ++e) {
    const auto h = r.edge_hits[e];
    if (!h) continue;
    const std::uint8_t bit = static_cast<std::uint8_t>(1u << bucketize(h));
    if (e >= masks_.size() || !(masks_[e] & bit)) ++n;
  }
  return n;
}

std::size_t CoverageMap::merge(const ExecResult& r) {
  ensure(r.edge_hits.size());
  std::size_t n = 0;
  for (std::size_t e = 0; e < r.edge_hits.size(); ++e) {
    const auto h = r.edge_hits[e];
    if (!h) continue;
    totals_[e] += h;
    const std::uint8_t bit = static_cast<std::uint8_t>(1u << bucketize(h));
    if (!(masks_[e] & bit)) {
      masks_[e] |= bit;
      ++n;
    }
  }
  return n;
}

MergeResult merge_coverage(const CoverageMap& m, const ExecResult& r) {
  MergeResult out{m, 0};
  out.new_flags = out.map.merge(r);
  return out;
}

double round_pct(std::size_t covered, std::size_t total) {
  if (total == 0) return 100.0;
  // Integer rounding to tenths, half up, avoids binary float drift.
  const std::uint64_t tenths = (static_cast<std::uint64_t>(covered) * 2000 + total) /
                               (2 * static_cast<std::uint64_t>(total));
  return static_cast<double>(tenths) / 10.0;
}

double coverage_pct(const CoverageMap& m, const InstrumentedProgram& ip) {
  return round_pct(m.covered_branch_edges(ip), ip.branch_edge_count);
}

}  // namespace greycone
