#pragma once

// Bounded decision procedure for conjunctions of fixed-width integer
// predicates: simplification, interval and residue propagation, then
// depth-first search over variable domains split at midpoints.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "greycone/symexpr.hpp"

namespace greycone {

inline constexpr std::uint64_t kDefaultSolverBudget = 200'000;

class UnsupportedExpr : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SolverStatus : std::uint8_t { Sat, Unsat, Timeout };

std::string_view status_name(SolverStatus s);

struct SolverStats {
  std::uint64_t nodes_explored = 0;
  std::uint64_t simplifications = 0;
};

struct ModelEntry {
  VarInfo var;
  std::uint32_t value = 0;  // bit pattern in the variable's width
};

struct SolverResult {
  SolverStatus status = SolverStatus::Unsat;
  std::vector<ModelEntry> model;  // ascending input index; empty unless sat
  SolverStats stats;

  std::optional<std::uint32_t> value(std::uint32_t index) const;
};

/// Semantics-preserving rewrite: constant folding, double negation,
/// negated comparisons, identity laws and constant chains. `count`
/// accumulates the number of rewrites applied.
SymRef simplify(const SymRef& e, std::uint64_t* count = nullptr);

/// Builds `op a` or `a op b` from operands that are already simplified,
/// rewriting only at the new root.
SymRef build_simplified(Op op, const SymRef& a, const SymRef& b = nullptr);

/// True when evaluating `e` can hit a division by zero.
bool can_trap(const SymNode& e);

/// Throws UnsupportedExpr when `e` is not a well-formed expression.
void validate(const SymNode& e);

struct SolveOptions {
  std::uint64_t budget = kDefaultSolverBudget;
  /// Preferred values, indexed by input index; tried first.
  const std::vector<std::uint32_t>* hint = nullptr;
};

/// A conjunct that traps under a valuation counts as false.
SolverResult solve(const std::vector<SymRef>& conjuncts, const SolveOptions& opt = {});

inline SolverResult solve(const PathPredicate& p, const SolveOptions& opt = {}) {
  return solve(p.all(), opt);
}

}  // namespace greycone
