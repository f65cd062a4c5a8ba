#include <doctest.h>

#include "greycone/orchestrator.hpp"
#include "support.hpp"

using namespace gtest;

namespace {

CampaignConfig config(Mode m, std::uint64_t seed, std::uint64_t budget = 200'000) {
  CampaignConfig c;
  c.mode = m;
  c.rng_seed = seed;
  c.budget_execs = budget;
  return c;
}

void check_invariants(const CampaignState& st, const CampaignConfig& cfg) {
  double prev = 0;
  for (std::size_t i = 0; i < st.phase_log.size(); ++i) {
    const auto& p = st.phase_log[i];
    CHECK(p.coverage_after >= p.coverage_before);
    CHECK(p.coverage_before >= prev);
    prev = p.coverage_after;
    if (i > 0 && cfg.mode == Mode::Greycone) CHECK(p.kind != st.phase_log[i - 1].kind);
    if (p.stop == StopReason::Target) CHECK(p.coverage_after >= cfg.target_pct);
    if (p.stop == StopReason::Cutoff) CHECK(st.executions >= *cfg.budget_execs);
  }
  if (cfg.mode == Mode::Greycone && !st.phase_log.empty()) {
    CHECK(st.phase_log.front().kind == PhaseKind::Fuzz);
  }
  for (std::size_t i = 1; i < st.series.size(); ++i) {
    CHECK(st.series[i].executions > st.series[i - 1].executions);
    CHECK(st.series[i].pct > st.series[i - 1].pct);
  }
  CHECK(st.executions <= *cfg.budget_execs);
  CHECK(st.final_pct == st.series.back().pct);
}

}  // namespace

TEST_CASE("single branch program ends inside the first fuzz phase") {
  const auto ip = corpus("parity");
  const auto cfg = config(Mode::Greycone, 7);
  const auto st = run_campaign(ip, {}, cfg);
  REQUIRE(st.phase_log.size() == 1);
  CHECK(st.phase_log[0].kind == PhaseKind::Fuzz);
  CHECK(st.phase_log[0].stop == StopReason::Target);
  CHECK(st.final_pct == 100.0);
  CHECK(st.target_reached);
  check_invariants(st, cfg);
}

TEST_CASE("motivating example: fuzzing alone falls short, the hybrid does not") {
  const auto ip = corpus("motiv");
  const auto fz = run_campaign(ip, {}, config(Mode::FuzzOnly, 7, 100'000));
  CHECK(fz.final_pct < 100.0);
  CHECK(fz.phase_log.size() == 1);
  const auto cfg = config(Mode::Greycone, 7, 100'000);
  const auto gc = run_campaign(ip, {}, cfg);
  CHECK(gc.final_pct == reachable_pct(ip));
  bool concolic = false;
  for (const auto& p : gc.phase_log) concolic |= p.kind == PhaseKind::Concolic;
  CHECK(concolic);
  CHECK(gc.crashes >= 1);
  check_invariants(gc, cfg);
}

TEST_CASE("a tiny target stops inside the first fuzz phase") {
  const auto ip = corpus("motiv");
  auto cfg = config(Mode::Greycone, 1);
  cfg.target_pct = 0.1;
  const auto st = run_campaign(ip, {}, cfg);
  REQUIRE(st.phase_log.size() == 1);
  CHECK(st.phase_log[0].stop == StopReason::Target);
  CHECK(st.execs_to_target == std::optional<std::uint64_t>(1));
}

TEST_CASE("campaign invariants across corpus, modes and seeds") {
  for (const auto& name : corpus_names()) {
    const auto ip = corpus(name);
    for (Mode m : {Mode::Greycone, Mode::FuzzOnly, Mode::ConcolicOnly}) {
      for (std::uint64_t seed : {1, 2}) {
        const auto cfg = config(m, seed, 60'000);
        const auto st = run_campaign(ip, {}, cfg);
        check_invariants(st, cfg);
        CHECK(st.queue.size() >= 1);
      }
    }
  }
}

TEST_CASE("solver tests are fed back into the queue") {
  const auto ip = corpus("nested_magic");
  const auto cfg = config(Mode::Greycone, 7);
  const auto st = run_campaign(ip, {}, cfg);
  std::size_t from_solver = 0;
  for (const auto& t : st.queue.entries) from_solver += t.origin == Origin::ConcolicSolver;
  std::uint64_t produced = 0;
  for (const auto& p : st.phase_log) {
    if (p.kind == PhaseKind::Concolic) produced += p.tests_produced;
  }
  CHECK(from_solver == produced);
  CHECK(from_solver >= 1);
  // the last fuzz phase built on the solver output
  REQUIRE(st.phase_log.size() >= 3);
  CHECK(st.phase_log.back().kind == PhaseKind::Fuzz);
  CHECK(st.final_pct == 100.0);
  // every queue entry has been traced by the concolic engine or came after
  CHECK(st.concolic.tree.trace_count() >= from_solver);
}

TEST_CASE("campaigns are reproducible") {
  const auto ip = corpus("motiv");
  const auto cfg = config(Mode::Greycone, 11, 80'000);
  const auto a = run_campaign(ip, {}, cfg);
  const auto b = run_campaign(ip, {}, cfg);
  CHECK(a.executions == b.executions);
  REQUIRE(a.queue.size() == b.queue.size());
  for (std::size_t i = 0; i < a.queue.size(); ++i) CHECK(a.queue.entries[i].bytes == b.queue.entries[i].bytes);
  CHECK(a.map == b.map);
  CHECK(a.phase_log.size() == b.phase_log.size());
}

TEST_CASE("initial seeds are normalized and used") {
  const auto ip = corpus("motiv");
  TestCase t;
  t.bytes = {0xDE, 0xC0, 23, 99};  // n = 0xC0DE, records = 23, one extra byte
  const auto st = run_campaign(ip, {t}, config(Mode::FuzzOnly, 1, 20'000));
  CHECK(st.queue.entries[0].bytes == std::vector<std::uint8_t>{0xDE, 0xC0, 23});
  CHECK(st.crashes >= 1);
}

TEST_CASE("configuration validation") {
  CampaignConfig c;
  CHECK_NOTHROW(c.validate());
  c.target_pct = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.target_pct = 100.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = CampaignConfig{};
  c.budget_execs = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = CampaignConfig{};
  c.fuzz_stall_execs = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = CampaignConfig{};
  c.conc_stall_secs = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK(parse_mode("fuzz-only") == Mode::FuzzOnly);
  CHECK_FALSE(parse_mode("afl").has_value());
  CHECK(mode_name(Mode::ConcolicOnly) == "concolic");
  CampaignConfig d;
  CHECK_FALSE(d.deterministic());
  d.budget_execs = 10;
  CHECK(d.deterministic());
}
