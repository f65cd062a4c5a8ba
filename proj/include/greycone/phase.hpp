#pragma once

// Bookkeeping shared by the fuzzing and concolic phases of a campaign.

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace greycone {

enum class PhaseKind : std::uint8_t { Fuzz, Concolic };
enum class StopReason : std::uint8_t { Stalled, Budget, Target, Exhausted, Cutoff };

std::string_view phase_kind_name(PhaseKind k);
std::string_view stop_reason_name(StopReason r);

struct PhaseReport {
  PhaseKind kind = PhaseKind::Fuzz;
  int index = 1;                     // fuzz_1, conc_1, fuzz_2, ...
  std::uint64_t executions = 0;
  std::uint64_t tests_produced = 0;  // new queue entries
  double coverage_before = 0;
  double coverage_after = 0;
  StopReason stop = StopReason::Stalled;
  double seconds = 0;
  // concolic only
  std::uint64_t solver_calls = 0;
  std::uint64_t sat = 0;
  std::uint64_t unsat = 0;
  std::uint64_t timeout = 0;
  std::uint64_t replays = 0;
  std::uint64_t replay_divergences = 0;
  std::uint64_t tree_nodes = 0;
  std::uint64_t frontier_size = 0;
};

struct SeriesPoint {
  std::uint64_t executions = 0;
  double seconds = 0;
  double pct = 0;
};

/// Campaign-wide clock, budget and coverage-over-time series. Both engines
/// tick it once per program execution.
class Progress {
 public:
  using Clock = std::chrono::steady_clock;

  Progress() : start_(Clock::now()) {}

  std::uint64_t executions() const { return executions_; }
  void tick() { ++executions_; }

  void set_exec_limit(std::uint64_t n) { exec_limit_ = n; }
  void set_time_limit(std::optional<double> secs) { time_limit_ = secs; }
  void set_target(double pct) { target_ = pct; }
  double target() const { return target_; }

  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

  bool cutoff() const {
    if (executions_ >= exec_limit_) return true;
    return time_limit_ && elapsed() >= *time_limit_;
  }

  bool target_reached() const { return pct_ >= target_; }
  double pct() const { return pct_; }

  /// Records the current coverage; appends a series point when it grew.
  void observe(double pct) {
    if (series_.empty() || pct > pct_) {
      pct_ = pct;
      series_.push_back({executions_, elapsed(), pct});
    }
  }

  const std::vector<SeriesPoint>& series() const { return series_; }

 private:
  Clock::time_point start_;
  std::uint64_t executions_ = 0;
  std::uint64_t exec_limit_ = std::numeric_limits<std::uint64_t>::max();
  std::optional<double> time_limit_;
  double target_ = 100.0;
  double pct_ = 0;
  std::vector<SeriesPoint> series_;
};

}  // namespace greycone
