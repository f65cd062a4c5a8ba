#pragma once

// Concolic execution: concrete runs that also collect symbolic branch
// predicates, an execution tree merging those paths, and the
// negate-and-solve loop that turns uncovered outcomes into new tests.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "greycone/coverage.hpp"
#include "greycone/dut.hpp"
#include "greycone/exec.hpp"
#include "greycone/phase.hpp"
#include "greycone/solver.hpp"
#include "greycone/symexpr.hpp"

namespace greycone {

inline constexpr std::uint32_t kDefaultForkLimit = 4;

class ReplayMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceStep {
  BlockId site = 0;
  bool taken = false;
  SymRef cond;               // branch condition; evaluates to `taken`
  bool is_symbolic = false;  // false: concrete, or concretized past the fork limit
  std::size_t pinned_before = 0;  // pinned facts recorded up to this step
};

struct PathTrace {
  std::uint64_t id = 0;
  std::vector<std::uint8_t> bytes;
  std::vector<std::uint32_t> input_values;  // bit pattern per input index
  std::vector<TraceStep> steps;             // every CondBranch evaluation
  std::vector<SymRef> pinned;  // facts the path relies on outside its symbolic steps
  ExecResult result;

  std::size_t symbolic_steps() const;
};

/// Mirrors run_concrete while tracking symbolic shadows of values that
/// depend on `symbolic` inputs. The first `fork_limit` symbolic evaluations
/// of each branch site become symbolic steps; later ones are concretized
/// and their direction pinned. Non-zero symbolic divisors are pinned too.
PathTrace run_symbolic(const InstrumentedProgram& ip, std::span<const std::uint8_t> bytes,
                       std::uint64_t step_limit = kDefaultStepLimit,
                       std::uint32_t fork_limit = kDefaultForkLimit);

/// Branch condition constrained to the direction a step took.
SymRef step_constraint(const TraceStep& s);

class ExecutionTree {
 public:
  struct Node {
    BlockId site = 0;
    SymRef cond;
    std::array<bool, 2> covered{};    // [false outcome, true outcome]
    std::array<bool, 2> attempted{};  // outcome already handed to the solver
    std::uint64_t origin = 0;         // trace that created the node
    std::size_t step = 0;             // index into that trace's steps
    std::size_t depth = 0;            // symbolic steps above this node
    std::size_t parent = 0;
    std::map<std::pair<bool, BlockId>, std::size_t> children;
  };

  ExecutionTree();

  /// Merges the trace and returns its id. A trace whose bytes were already
  /// added returns the earlier id and leaves the tree unchanged. Throws
  /// ReplayMismatch when a step's predicate disagrees with its direction.
  std::uint64_t add_trace(PathTrace trace);

  /// One predicate per uncovered, unattempted outcome of a node whose other
  /// outcome is covered. Deepest first, then ascending site, then node age.
  std::vector<PathPredicate> frontier() const;

  /// Number of entries frontier() would return, and its first entry.
  std::size_t frontier_size() const { return open_outcomes().size(); }
  std::optional<PathPredicate> next_target() const;

  /// Builds the predicate targeting `outcome` at node `id`.
  PathPredicate predicate_for(std::size_t id, bool outcome) const;

  void mark_attempted(const PathPredicate& p);

  std::size_t node_count() const { return nodes_.size() - 1; }
  std::size_t covered_outcomes() const;
  std::size_t trace_count() const { return traces_.size(); }
  const PathTrace& trace(std::uint64_t id) const { return traces_.at(id); }
  const Node& node(std::size_t id) const { return nodes_.at(id); }
  bool has_trace(const std::vector<std::uint8_t>& bytes) const {
    return by_bytes_.count(bytes) != 0;
  }
  std::optional<std::uint64_t> find_trace(const std::vector<std::uint8_t>& bytes) const {
    const auto it = by_bytes_.find(bytes);
    if (it == by_bytes_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::pair<std::size_t, bool>> open_outcomes() const;

  std::vector<Node> nodes_;  // [0] is the root and tests nothing
  std::vector<PathTrace> traces_;
  std::map<std::vector<std::uint8_t>, std::uint64_t> by_bytes_;
};

/// Input bytes for a model: symbolic inputs the model assigns take the
/// model value, everything else keeps the seed's bytes.
std::vector<std::uint8_t> materialize(const Program& p, const std::vector<std::uint8_t>& seed,
                                      const SolverResult& model);

/// True when `t` follows `origin` up to the target step and takes the
/// desired outcome there.
bool replay_matches(const PathTrace& origin, const PathTrace& t, const PathPredicate& p);

struct ConcolicConfig {
  std::uint64_t step_limit = kDefaultStepLimit;
  std::uint32_t fork_limit = kDefaultForkLimit;
  std::uint64_t solver_budget = kDefaultSolverBudget;
  std::uint64_t stall_calls = 64;           // 0 disables
  std::optional<double> stall_seconds;      // replaces stall_calls when set
  std::vector<std::string>* predicate_log = nullptr;
};

/// New test produced by a phase, with the run that validated it.
struct ConcolicTest {
  TestCase test;
  ExecResult result;
  bool replay_ok = true;
};

struct ConcolicState {
  ExecutionTree tree;
};

/// Traces the untraced seeds, then repeatedly solves the first frontier
/// predicate, executes and traces SAT tests and merges their coverage.
/// Stops on exhausted frontier, stall, target coverage or global cutoff.
PhaseReport concolic_phase(const InstrumentedProgram& ip, const std::vector<TestCase>& seeds,
                           ConcolicState& state, CoverageMap& map, Progress& progress,
                           const ConcolicConfig& cfg, std::vector<ConcolicTest>& out);

}  // namespace greycone
