#pragma once

// Symbolic expressions over the symbolic inputs of a program.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "greycone/value.hpp"

namespace greycone {

struct SymNode;
using SymRef = std::shared_ptr<const SymNode>;

struct SymNode {
  enum class Kind : std::uint8_t { Const, Var, Unary, Binary, Compare, Logic };

  Kind kind = Kind::Const;
  Op op = Op::Add;
  IntType type;          // result type
  IntType operand_type;  // shared operand type for Unary/Binary/Compare
  std::uint32_t value = 0;
  std::uint32_t var = 0;  // input index
  std::string name;
  std::uint32_t depth = 1;
  SymRef a;
  SymRef b;
};

class SexpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SymRef sym_const(IntType t, std::uint32_t bits);
SymRef sym_bool(bool v);
SymRef sym_var(std::uint32_t index, std::string name, IntType t);
SymRef sym_unary(Op op, SymRef a);
/// Arithmetic, comparison or logic node depending on `op`. Operand types
/// must agree.
SymRef sym_binary(Op op, SymRef a, SymRef b);
SymRef sym_not(SymRef p);

bool is_const(const SymNode& n);
bool is_true(const SymNode& n);
bool is_false(const SymNode& n);

/// Evaluates with `env[i]` holding input i. nullopt when a division traps.
std::optional<std::uint32_t> eval(const SymNode& n,
                                  const std::vector<std::uint32_t>& env);

/// Structural equality.
bool sym_equal(const SymNode& x, const SymNode& y);
std::size_t sym_size(const SymNode& n);
std::size_t sym_depth(const SymNode& n);

struct VarInfo {
  std::uint32_t index = 0;
  std::string name;
  IntType type;
  friend bool operator==(const VarInfo&, const VarInfo&) = default;
};

/// Distinct variables, ascending input index.
std::vector<VarInfo> collect_vars(const SymNode& n);
void collect_vars(const SymNode& n, std::vector<VarInfo>& out);

/// `(eq (add (var n u16) (const u16 3)) (const u16 0))`. Variables carry
/// `#index` when it is non-zero: `(var n#1 u16)`.
std::string to_sexp(const SymNode& n);
SymRef parse_sexp(std::string_view text);

/// Conjunction handed to the solver. `conjuncts` are the branch predicates
/// along the prefix with the target predicate last; `assumptions` are the
/// facts the prefix relied on that are not branch-site predicates
/// (concretized loop tests, non-zero divisors).
struct PathPredicate {
  std::vector<SymRef> conjuncts;
  std::vector<SymRef> assumptions;
  std::uint32_t target_site = 0;
  bool desired = true;
  std::size_t depth = 0;         // symbolic steps in the prefix
  std::uint64_t origin = 0;      // trace the prefix came from
  std::size_t target_step = 0;   // branch step index in that trace
  std::size_t node = 0;          // execution-tree node being targeted

  std::vector<SymRef> all() const;
  std::vector<VarInfo> vars() const;
};

/// One conjunct per line followed by `; assume` lines for assumptions.
std::string dump_predicate(const PathPredicate& p);
PathPredicate parse_predicate(std::string_view text);

}  // namespace greycone
