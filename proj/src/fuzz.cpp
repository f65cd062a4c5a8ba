#include "greycone/fuzz.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>

namespace greycone {

std::optional<std::size_t> SeedQueue::push(TestCase t, const ExecResult* r,
                                           const InstrumentedProgram* ip) {
  if (!keys_.insert(t.bytes).second) return std::nullopt;
  t.id = entries.size();
  EntryStats st;
  if (r) {
    st.executed = true;
    st.steps = r->steps;
    st.depth = r->depth;
    st.branch_edges = ip ? r->branch_edges_hit(*ip) : 0;
  }
  entries.push_back(std::move(t));
  stats.push_back(st);
  return entries.size() - 1;
}

std::uint32_t calculate_energy(std::uint64_t steps, std::size_t branch_edges,
                               std::uint32_t depth, const EnergyContext& ctx) {
  const double speed =
      std::clamp(ctx.avg_steps / static_cast<double>(std::max<std::uint64_t>(steps, 1)), 0.25, 4.0);
  const double cov = 1.0 + (ctx.total_branch_edges
                                ? static_cast<double>(branch_edges) /
                                      static_cast<double>(ctx.total_branch_edges)
                                : 0.0);
  const double dep = 1.0 + static_cast<double>(depth) /
                               static_cast<double>(std::max<std::uint32_t>(ctx.max_depth, 1));
  const double k = std::round(kEnergyBase * speed * cov * dep);
  return static_cast<std::uint32_t>(
      std::clamp(k, static_cast<double>(kEnergyMin), static_cast<double>(kEnergyMax)));
}

// -- mutation ---------------------------------------------------------------

namespace {

constexpr int kArithMax = 35;
constexpr std::size_t kArithVariants = 2 * kArithMax;
constexpr std::size_t kInterestingCount = 9;

std::uint32_t interesting(std::size_t width_bytes, std::size_t i) {
  const unsigned bits = static_cast<unsigned>(width_bytes * 8);
  const std::uint32_t mask = width_mask(bits);
  const std::uint32_t smin = 1u << (bits - 1);
  const std::array<std::uint32_t, kInterestingCount> v = {0u, 1u, mask, smin - 1, smin,
                                                          16u, 32u, 64u, 100u};
  return v[i];
}

std::uint32_t load(const std::vector<std::uint8_t>& b, std::size_t pos, std::size_t w) {
  std::uint32_t v = 0;
  for (std::size_t k = 0; k < w; ++k) v |= std::uint32_t{b[pos + k]} << (8 * k);
  return v;
}

void store(std::vector<std::uint8_t>& b, std::size_t pos, std::size_t w, std::uint32_t v) {
  for (std::size_t k = 0; k < w; ++k) b[pos + k] = static_cast<std::uint8_t>(v >> (8 * k));
}

void add_word(std::vector<std::uint8_t>& b, std::size_t pos, std::size_t w, int delta) {
  const std::uint32_t mask = width_mask(static_cast<unsigned>(w * 8));
  store(b, pos, w, (load(b, pos, w) + static_cast<std::uint32_t>(delta)) & mask);
}

std::size_t windows(std::size_t len, std::size_t w) { return len >= w ? len - w + 1 : 0; }

// Widest of 4/2/1 bytes not above `want` that fits in `len`.
std::size_t fit_width(std::size_t want, std::size_t len) {
  while (want > len) want /= 2;
  return want;
}

}  // namespace

std::size_t deterministic_count(std::size_t len) {
  const std::size_t bits = 8 * len;
  return bits + windows(bits, 2) + windows(bits, 4) + len +
         kArithVariants * (len + windows(len, 2) + windows(len, 4)) +
         kInterestingCount * (len + windows(len, 2) + windows(len, 4));
}

std::vector<std::uint8_t> deterministic_mutant(const std::vector<std::uint8_t>& seed,
                                               std::size_t index) {
  std::vector<std::uint8_t> out = seed;
  const std::size_t len = seed.size();
  const std::size_t bits = 8 * len;

  auto flip_bits = [&](std::size_t first, std::size_t n) {
    for (std::size_t b = first; b < first + n; ++b) out[b / 8] ^= static_cast<std::uint8_t>(1u << (b % 8));
  };

  for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{4}}) {
    const std::size_t c = windows(bits, n);
    if (index < c) {
      flip_bits(index, n);
      return out;
    }
    index -= c;
  }
  if (index < len) {
    out[index] ^= 0xFF;
    return out;
  }
  index -= len;
  for (std::size_t w : {std::size_t{1}, std::size_t{2}, std::size_t{4}}) {
    const std::size_t c = kArithVariants * windows(len, w);
    if (index < c) {
      const std::size_t pos = index / kArithVariants;
      const int k = static_cast<int>(index % kArithVariants);
      add_word(out, pos, w, k < kArithMax ? k + 1 : -(k - kArithMax + 1));
      return out;
    }
    index -= c;
  }
  for (std::size_t w : {std::size_t{1}, std::size_t{2}, std::size_t{4}}) {
    const std::size_t c = kInterestingCount * windows(len, w);
    if (index < c) {
      store(out, index / kInterestingCount, w, interesting(w, index % kInterestingCount));
      return out;
    }
    index -= c;
  }
  return out;
}

std::vector<std::uint8_t> havoc(const std::vector<std::uint8_t>& seed, Rng& rng) {
  std::vector<std::uint8_t> out = seed;
  const std::size_t len = out.size();
  if (len == 0) return out;
  const std::uint32_t stack = 1u << (1 + rng() % 7);
  for (std::uint32_t i = 0; i < stack; ++i) {
    switch (rng() % 9) {
      case 0: {
        const std::size_t b = rng() % (8 * len);
        out[b / 8] ^= static_cast<std::uint8_t>(1u << (b % 8));
        break;
      }
      case 1:
      case 2:
      case 3: {
        const std::size_t w = fit_width(std::size_t{1} << (rng() % 3), len);
        const std::size_t pos = rng() % (len - w + 1);
        store(out, pos, w, interesting(w, rng() % kInterestingCount));
        break;
      }
      case 4:
      case 5:
      case 6: {
        const std::size_t w = fit_width(std::size_t{1} << (rng() % 3), len);
        const std::size_t pos = rng() % (len - w + 1);
        const int delta = 1 + static_cast<int>(rng() % kArithMax);
        add_word(out, pos, w, rng() % 2 ? delta : -delta);
        break;
      }
      case 7:
        out[rng() % len] ^= static_cast<std::uint8_t>(1 + rng() % 255);
        break;
      default:
        out[rng() % len] = static_cast<std::uint8_t>(rng() % 256);
        break;
    }
  }
  return out;
}

TestCase mutate_seed(const TestCase& t, Rng& rng) {
  TestCase m;
  m.bytes = havoc(t.bytes, rng);
  m.origin = Origin::FuzzMutation;
  return m;
}

// -- phase ------------------------------------------------------------------

PhaseReport Fuzzer::phase(const InstrumentedProgram& ip, SeedQueue& q, CoverageMap& map,
                          Progress& progress, const FuzzConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto last_gain = start;
  PhaseReport rep;
  rep.kind = PhaseKind::Fuzz;
  rep.coverage_before = coverage_pct(map, ip);
  q.last_interesting_at = q.exec_count;
  std::uint64_t phase_execs = 0;

  auto finish = [&](StopReason why) {
    rep.stop = why;
    rep.coverage_after = coverage_pct(map, ip);
    rep.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return rep;
  };
  auto should_stop = [&](bool check_target = true) -> std::optional<StopReason> {
    if (check_target && progress.target_reached()) return StopReason::Target;
    if (progress.cutoff()) return StopReason::Cutoff;
    if (phase_execs >= cfg.exec_budget) return StopReason::Budget;
    if (cfg.stall_seconds) {
      if (std::chrono::duration<double>(Clock::now() - last_gain).count() >= *cfg.stall_seconds) {
        return StopReason::Stalled;
      }
    } else if (cfg.stall_execs && q.exec_count - q.last_interesting_at >= cfg.stall_execs) {
      return StopReason::Stalled;
    }
    return std::nullopt;
  };
  auto run = [&](const std::vector<std::uint8_t>& bytes) {
    ExecResult r = run_concrete(ip, bytes, cfg.step_limit);
    ++q.exec_count;
    ++phase_execs;
    ++rep.executions;
    progress.tick();
    const std::size_t fresh = map.merge(r);
    if (fresh) {
      q.last_interesting_at = q.exec_count;
      last_gain = Clock::now();
      progress.observe(coverage_pct(map, ip));
    }
    return std::make_pair(std::move(r), fresh);
  };

  // Target is not checked yet so that pending seeds always run once.
  if (auto s = should_stop(false)) return finish(*s);
  if (q.entries.empty()) {
    TestCase zero;
    zero.bytes.assign(ip.program.input_bytes(), 0);
    q.push(std::move(zero));
  }
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q.stats[i].executed) continue;
    auto [r, fresh] = run(normalize_input(ip.program, q.entries[i].bytes));
    EntryStats& st = q.stats[i];
    st.executed = true;
    st.steps = r.steps;
    st.depth = r.depth;
    st.branch_edges = r.branch_edges_hit(ip);
    if (auto s = should_stop(false)) return finish(*s);
  }
  if (auto s = should_stop()) return finish(*s);
  if (ip.program.input_bytes() == 0) return finish(StopReason::Stalled);

  for (;;) {
    const std::size_t idx = q.cursor % q.size();
    EnergyContext ctx;
    ctx.total_branch_edges = ip.branch_edge_count;
    double total_steps = 0;
    std::size_t counted = 0;
    for (const auto& st : q.stats) {
      if (!st.executed) continue;
      total_steps += static_cast<double>(st.steps);
      ctx.max_depth = std::max(ctx.max_depth, st.depth);
      ++counted;
    }
    ctx.avg_steps = counted ? total_steps / static_cast<double>(counted) : 1.0;
    const EntryStats seed_stats = q.stats[idx];
    const std::uint32_t energy =
        calculate_energy(seed_stats.steps, seed_stats.branch_edges, seed_stats.depth, ctx);
    q.entries[idx].energy = energy;
    const std::vector<std::uint8_t> seed = normalize_input(ip.program, q.entries[idx].bytes);

    auto keep = [&](const std::vector<std::uint8_t>& bytes) {
      auto [r, fresh] = run(bytes);
      if (!fresh) return;
      TestCase t;
      t.bytes = bytes;
      t.origin = Origin::FuzzMutation;
      t.discovered_at = progress.executions();
      if (q.push(std::move(t), &r, &ip)) ++rep.tests_produced;
    };

    if (!q.stats[idx].det_done) {
      const std::size_t total = deterministic_count(seed.size());
      while (q.stats[idx].det_cursor < total) {
        keep(deterministic_mutant(seed, q.stats[idx].det_cursor++));
        if (auto s = should_stop()) return finish(*s);
      }
      q.stats[idx].det_done = true;
    }
    for (std::uint32_t k = 0; k < energy; ++k) {
      keep(havoc(seed, rng_));
      if (auto s = should_stop()) return finish(*s);
    }
    q.cursor = (idx + 1) % q.size();
  }
}

}  // namespace greycone
