#include <doctest.h>

#include <random>

#include "support.hpp"

using namespace gtest;

namespace {

int table_bucket(std::uint32_t raw) {
  static const std::uint32_t lower[] = {1, 2, 3, 4, 8, 16, 32, 128};
  int b = 0;
  for (int i = 0; i < 8; ++i) {
    if (raw >= lower[i]) b = i;
  }
  return b;
}

ExecResult synthetic(std::size_t edges, std::mt19937_64& rng) {
  ExecResult r;
  r.edge_hits.assign(edges, 0);
  for (auto& h : r.edge_hits) {
    if (rng() % 3 == 0) h = static_cast<std::uint32_t>(1 + rng() % 1000);
  }
  return r;
}

}  // namespace

TEST_CASE("bucket table") {
  CHECK(bucketize(1) == 0);
  CHECK(bucketize(5) == 3);
  CHECK(bucketize(200) == 7);
  for (std::uint32_t raw = 1; raw <= 1000; ++raw) REQUIRE(bucketize(raw) == table_bucket(raw));
  CHECK(bucketize(0xFFFFFFFFu) == 7);
  for (std::uint32_t raw = 2; raw <= 1000; ++raw) CHECK(bucketize(raw) >= bucketize(raw - 1));
}

TEST_CASE("merge examples") {
  const auto ip = program("input u8 n; while (n > 0) { n = n - 1; }");
  CoverageMap m(ip.edges.size());
  const auto five = run_concrete(ip, std::vector<std::uint8_t>{5});
  CHECK(is_interesting(five, m));
  const auto first = merge_coverage(m, five);
  CHECK(first.new_flags >= 1);
  CHECK(first.map.flags_set() == first.new_flags);
  const auto again = merge_coverage(first.map, five);
  CHECK(again.new_flags == 0);
  CHECK_FALSE(is_interesting(five, first.map));

  const auto nine = run_concrete(ip, std::vector<std::uint8_t>{9});
  const EdgeId back_in = branch_sites(ip)[0].true_edge;
  CHECK(bucketize(five.edge_hits[back_in]) == 3);
  CHECK(bucketize(nine.edge_hits[back_in]) == 4);
  CHECK(is_interesting(nine, first.map));
  const auto second = merge_coverage(first.map, nine);
  CHECK(second.new_flags == 2);  // loop-entry edge and loop-back edge, bucket 8-15
  CHECK(second.map.seen(back_in, 4));
  CHECK(m.flags_set() == 0);  // merge_coverage never touches its input
}

TEST_CASE("random merge sequences are monotone") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t edges = 1 + rng() % 40;
    CoverageMap m(edges);
    std::size_t flags = 0;
    std::size_t covered = 0;
    for (int k = 0; k < 30; ++k) {
      const auto r = synthetic(edges, rng);
      const CoverageMap before = m;
      const std::size_t predicted = m.count_new(r);
      CHECK(m == before);
      const std::size_t fresh = m.merge(r);
      CHECK(fresh == predicted);
      CHECK(m.flags_set() == flags + fresh);
      flags = m.flags_set();
      std::size_t now = 0;
      for (EdgeId e = 0; e < edges; ++e) {
        now += m.edge_covered(e);
        // superset of the previous map
        CHECK((before.mask(e) & m.mask(e)) == before.mask(e));
        if (r.edge_hits[e]) CHECK(m.seen(e, bucketize(r.edge_hits[e])));
      }
      CHECK(now >= covered);
      covered = now;
      CHECK((fresh == 0) == (m.flags_set() == before.flags_set()));
    }
  }
}

TEST_CASE("cumulative totals add up") {
  const auto ip = corpus("loop_eq");
  CoverageMap m(ip.edges.size());
  std::vector<std::uint64_t> sum(ip.edges.size(), 0);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto r = run_concrete(ip, bytes_of(rng(), 2));
    m.merge(r);
    for (EdgeId e = 0; e < ip.edges.size(); ++e) sum[e] += r.edge_hits[e];
  }
  for (EdgeId e = 0; e < ip.edges.size(); ++e) CHECK(m.total_hits(e) == sum[e]);
}

TEST_CASE("coverage percentage") {
  const auto ip = corpus("motiv");
  CoverageMap m(ip.edges.size());
  CHECK(coverage_pct(m, ip) == 0.0);
  // Divisible by both (n=6) and by neither (n=1), no loop iterations:
  // loop exit, both outcomes of the first check, the inner k == 23 guard
  // false, and the false outcomes of the two remaining chain checks.
  m.merge(run_concrete(ip, bytes_of(6, 3)));
  m.merge(run_concrete(ip, bytes_of(1, 3)));
  CHECK(m.covered_branch_edges(ip) == 6);
  CHECK(coverage_pct(m, ip) == 50.0);
  const auto sl = corpus("straightline");
  CHECK(coverage_pct(CoverageMap(sl.edges.size()), sl) == 100.0);
  const auto par = corpus("parity");
  CoverageMap pm(par.edges.size());
  pm.merge(run_concrete(par, bytes_of(0, 1)));
  pm.merge(run_concrete(par, bytes_of(1, 1)));
  CHECK(coverage_pct(pm, par) == 100.0);
}

TEST_CASE("percent rounding is half-up to one decimal") {
  CHECK(round_pct(1, 3) == doctest::Approx(33.3));
  CHECK(round_pct(2, 3) == doctest::Approx(66.7));
  CHECK(round_pct(11, 12) == doctest::Approx(91.7));
  CHECK(round_pct(1, 40) == doctest::Approx(2.5));
  CHECK(round_pct(1, 2000) == doctest::Approx(0.1));
  CHECK(round_pct(1, 2001) == doctest::Approx(0.0));
  CHECK(round_pct(0, 0) == 100.0);
  for (std::size_t total = 1; total <= 300; ++total) {
    for (std::size_t c = 0; c <= total; ++c) {
      // integer oracle: tenths = floor((1000 c + total/2 ... ) / total) half-up
      const std::uint64_t tenths = (2000 * c + total) / (2 * total);
      REQUIRE(round_pct(c, total) == doctest::Approx(static_cast<double>(tenths) / 10.0));
    }
  }
}
