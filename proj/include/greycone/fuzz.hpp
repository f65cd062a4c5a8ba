#pragma once

// Coverage-guided mutational fuzzing over raw input bytes.

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "greycone/coverage.hpp"
#include "greycone/dut.hpp"
#include "greycone/exec.hpp"
#include "greycone/phase.hpp"

namespace greycone {

inline constexpr std::uint32_t kEnergyBase = 64;
inline constexpr std::uint32_t kEnergyMin = 8;
inline constexpr std::uint32_t kEnergyMax = 1024;

/// Run summary kept per queue entry for scheduling.
struct EntryStats {
  bool executed = false;
  std::uint64_t steps = 0;
  std::uint32_t depth = 0;
  std::size_t branch_edges = 0;
  std::size_t det_cursor = 0;  // next deterministic mutant
  bool det_done = false;
};

struct SeedQueue {
  std::vector<TestCase> entries;
  std::vector<EntryStats> stats;  // parallel to entries
  std::size_t cursor = 0;
  std::uint64_t exec_count = 0;
  std::uint64_t last_interesting_at = 0;

  std::size_t size() const { return entries.size(); }
  bool contains(const std::vector<std::uint8_t>& bytes) const { return keys_.count(bytes) != 0; }

  /// Appends unless the bytes are already queued. Returns the entry index
  /// or nullopt for a duplicate. `r` marks the entry as already executed.
  std::optional<std::size_t> push(TestCase t, const ExecResult* r = nullptr,
                                  const InstrumentedProgram* ip = nullptr);

 private:
  std::set<std::vector<std::uint8_t>> keys_;
};

struct EnergyContext {
  double avg_steps = 1;
  std::uint32_t max_depth = 1;
  std::size_t total_branch_edges = 0;
};

/// K = clamp(round(64 * f_speed * f_cov * f_depth), 8, 1024) with
/// f_speed = avg/steps in [0.25, 4], f_cov = 1 + covered/total and
/// f_depth = 1 + depth/max_depth.
std::uint32_t calculate_energy(std::uint64_t steps, std::size_t branch_edges,
                               std::uint32_t depth, const EnergyContext& ctx);

inline std::uint32_t calculate_energy(const ExecResult& r, const InstrumentedProgram& ip,
                                      const EnergyContext& ctx) {
  return calculate_energy(r.steps, r.branch_edges_hit(ip), r.depth, ctx);
}

using Rng = std::mt19937_64;

/// Number of deterministic mutants for an input of `len` bytes.
std::size_t deterministic_count(std::size_t len);

/// The `index`-th deterministic mutant: walking 1/2/4-bit flips, byte
/// flips, +-1..35 on 8/16/32-bit little-endian words, then interesting
/// values on the same widths.
std::vector<std::uint8_t> deterministic_mutant(const std::vector<std::uint8_t>& seed,
                                               std::size_t index);

/// Stacks 2..128 random operations on a copy of `seed`.
std::vector<std::uint8_t> havoc(const std::vector<std::uint8_t>& seed, Rng& rng);

/// Havoc mutant of `t` with the same length, tagged as a fuzz mutation.
TestCase mutate_seed(const TestCase& t, Rng& rng);

struct FuzzConfig {
  std::uint64_t step_limit = kDefaultStepLimit;
  std::uint64_t stall_execs = 10'000;     // 0 disables
  std::optional<double> stall_seconds;    // replaces stall_execs when set
  std::uint64_t exec_budget = std::numeric_limits<std::uint64_t>::max();  // per phase
};

class Fuzzer {
 public:
  explicit Fuzzer(std::uint64_t seed) : rng_(seed) {}

  /// Runs until stall, phase budget, target coverage or global cutoff.
  /// Unexecuted queue entries run first.
  PhaseReport phase(const InstrumentedProgram& ip, SeedQueue& q, CoverageMap& map,
                    Progress& progress, const FuzzConfig& cfg);

  Rng& rng() { return rng_; }

 private:
  Rng rng_;
};

}  // namespace greycone
