#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "greycone/dut.hpp"

namespace greycone {

inline constexpr std::uint64_t kDefaultStepLimit = 100'000;

enum class Origin : std::uint8_t { Initial, FuzzMutation, ConcolicSolver };

/// Short tag used in queue file names: initial, fuzz or concolic.
std::string_view origin_tag(Origin o);

struct TestCase {
  std::vector<std::uint8_t> bytes;
  std::uint32_t energy = 0;
  Origin origin = Origin::Initial;
  std::uint64_t discovered_at = 0;  // execution counter stamp
  std::uint64_t id = 0;
};

enum class Outcome : std::uint8_t { Returned, Failed, StepLimit };

std::string_view outcome_name(Outcome o);

struct ExecResult {
  std::vector<std::uint32_t> edge_hits;  // dense by EdgeId; 0 = not traversed
  Outcome outcome = Outcome::Returned;
  std::uint64_t steps = 0;
  std::uint32_t depth = 0;               // distinct blocks visited
  std::vector<std::uint32_t> values;     // final variable slots

  std::size_t branch_edges_hit(const InstrumentedProgram& ip) const;
  std::uint64_t total_hits() const;
};

/// Pads with zeros or truncates to the program's serialized input width.
std::vector<std::uint8_t> normalize_input(const Program& p,
                                          std::span<const std::uint8_t> bytes);

/// Initial variable slots: inputs decoded little-endian in declaration
/// order, locals zeroed.
std::vector<std::uint32_t> decode_inputs(const Program& p,
                                         std::span<const std::uint8_t> bytes);

/// Writes `value` into the serialized bytes of input `index`.
void encode_input(const Program& p, std::size_t index, std::uint32_t value,
                  std::vector<std::uint8_t>& bytes);

/// Runs the program on concrete bytes. Each statement and each terminator
/// costs one step; reaching `step_limit` stops the run with
/// Outcome::StepLimit. Division by zero traps to the Fail sink.
ExecResult run_concrete(const InstrumentedProgram& ip,
                        std::span<const std::uint8_t> bytes,
                        std::uint64_t step_limit = kDefaultStepLimit);

inline ExecResult run_concrete(const InstrumentedProgram& ip, const TestCase& t,
                               std::uint64_t step_limit = kDefaultStepLimit) {
  return run_concrete(ip, t.bytes, step_limit);
}

}  // namespace greycone
