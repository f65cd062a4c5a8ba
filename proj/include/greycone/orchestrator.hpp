#pragma once

// Campaign driver: alternates fuzzing and concolic phases on stall
// signals, or runs a single engine as a baseline.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "greycone/concolic.hpp"
#include "greycone/coverage.hpp"
#include "greycone/dut.hpp"
#include "greycone/fuzz.hpp"
#include "greycone/phase.hpp"

namespace greycone {

enum class Mode : std::uint8_t { Greycone, FuzzOnly, ConcolicOnly };

std::string_view mode_name(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

struct CampaignConfig {
  double target_pct = 100.0;
  std::optional<std::uint64_t> budget_execs;  // execution-counted budget
  double time_cutoff = 7200.0;                // seconds, used without budget_execs
  std::uint64_t fuzz_stall_execs = 10'000;
  std::optional<double> fuzz_stall_secs;
  std::uint64_t conc_stall_calls = 64;
  std::optional<double> conc_stall_secs;
  std::uint64_t rng_seed = 0;
  std::uint64_t step_limit = kDefaultStepLimit;
  std::uint32_t fork_limit = kDefaultForkLimit;
  std::uint64_t solver_budget = kDefaultSolverBudget;
  Mode mode = Mode::Greycone;
  bool record_predicates = false;

  /// Logical time: every budget is counted in executions or solver calls.
  bool deterministic() const {
    return budget_execs.has_value() && !fuzz_stall_secs && !conc_stall_secs;
  }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct CampaignState {
  std::vector<PhaseReport> phase_log;
  SeedQueue queue;
  ConcolicState concolic;
  CoverageMap map;
  std::vector<SeriesPoint> series;
  std::vector<std::string> predicates;  // filled when record_predicates is set
  std::uint64_t executions = 0;
  double seconds = 0;
  double final_pct = 0;
  bool target_reached = false;
  std::uint64_t execs_to_final = 0;  // executions when final coverage was first reached
  double secs_to_final = 0;
  std::optional<std::uint64_t> execs_to_target;
  std::size_t crashes = 0;  // queue entries that end in the fail sink
};

/// Runs one campaign. `initial` may be empty; a zero seed is synthesized.
CampaignState run_campaign(const InstrumentedProgram& ip, const std::vector<TestCase>& initial,
                           const CampaignConfig& cfg);

}  // namespace greycone
