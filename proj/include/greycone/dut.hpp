#pragma once

// MiniDUT: a small imperative design language with fixed-width integers,
// if/while control flow and a `fail` bug sink. Source text is parsed into
// an AST, type checked, and lowered to a CFG of basic blocks whose edges
// carry dense instrumentation ids.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "greycone/value.hpp"

namespace greycone {

using BlockId = std::uint32_t;
using EdgeId = std::uint32_t;
inline constexpr std::uint32_t kNoId = 0xFFFFFFFFu;

struct SourceLoc {
  int line = 0;
  int column = 0;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(SourceLoc loc, const std::string& what);
  SourceLoc loc;
};

class TypeError : public std::runtime_error {
 public:
  TypeError(SourceLoc loc, const std::string& what);
  SourceLoc loc;
};

// ---------------------------------------------------------------------------
// Expressions and statements

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind : std::uint8_t { Const, Var, Unary, Binary };

  Kind kind = Kind::Const;
  Op op = Op::Add;
  IntType type;          // result type
  IntType operand_type;  // for Binary: type both operands share
  std::uint32_t value = 0;
  std::uint32_t var = 0;  // slot index into Program::vars
  ExprPtr lhs;
  ExprPtr rhs;
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;
using StmtList = std::vector<StmtPtr>;

struct Stmt {
  enum class Kind : std::uint8_t { Assign, If, While, Return, Fail };

  Kind kind = Kind::Return;
  SourceLoc loc;
  std::uint32_t var = 0;  // Assign target
  ExprPtr expr;           // Assign value, If/While condition
  StmtList body;          // If-then, While body
  StmtList orelse;        // If-else
  bool has_else = false;
};

// ---------------------------------------------------------------------------
// Program / CFG

struct InputDecl {
  std::string name;
  IntType type;
  bool symbolic = false;
  std::size_t byte_offset = 0;  // position in the serialized input

  std::size_t bytes() const { return type.width / 8; }
};

struct Variable {
  std::string name;
  IntType type;
  bool is_input = false;
};

struct Assign {
  std::uint32_t var = 0;
  ExprPtr value;
  SourceLoc loc;
};

struct Terminator {
  enum class Kind : std::uint8_t { Goto, CondBranch, Return, Fail };

  Kind kind = Kind::Return;
  ExprPtr cond;                  // CondBranch only
  BlockId target = kNoId;        // Goto target / CondBranch true successor
  BlockId false_target = kNoId;  // CondBranch false successor
  SourceLoc loc;
};

struct BasicBlock {
  BlockId id = 0;
  std::vector<Assign> statements;
  Terminator term;
};

struct Program {
  std::string name;
  std::vector<InputDecl> inputs;  // declaration order
  std::vector<Variable> vars;     // inputs first (slot i == inputs[i]), then locals
  std::vector<BasicBlock> blocks;
  BlockId entry = 0;
  StmtList body;  // the AST the CFG was lowered from

  std::size_t input_bytes() const;
  std::size_t symbolic_input_count() const;
};

struct Edge {
  BlockId from = 0;
  BlockId to = 0;
  bool is_branch = false;  // leaves a CondBranch block
};

struct BlockEdges {
  EdgeId taken = kNoId;      // Goto edge or CondBranch true edge
  EdgeId not_taken = kNoId;  // CondBranch false edge
};

struct CompiledCode;  // flat bytecode used by the concrete interpreter

struct InstrumentedProgram {
  Program program;
  std::vector<Edge> edges;              // indexed by EdgeId
  std::vector<BlockEdges> block_edges;  // indexed by BlockId
  std::size_t branch_edge_count = 0;
  std::uint64_t edge_table_hash = 0;
  std::shared_ptr<const CompiledCode> code;
};

struct BranchSite {
  BlockId block = 0;
  EdgeId true_edge = 0;
  EdgeId false_edge = 0;
  int line = 0;

  friend bool operator==(const BranchSite&, const BranchSite&) = default;
};

/// Parses MiniDUT source. Throws SyntaxError / TypeError.
Program parse(std::string_view source, std::string name = "dut");

/// Reads and parses a `.dut` file; the program is named after the file stem.
Program parse_file(const std::string& path);

/// Renders the AST back to MiniDUT source.
std::string pretty_print(const Program& p);

/// Canonical text dump of declarations and CFG; equal dumps mean
/// structurally equal programs.
std::string dump_cfg(const Program& p);

InstrumentedProgram instrument(const Program& p);

/// One entry per CondBranch terminator, ascending block id.
std::vector<BranchSite> branch_sites(const InstrumentedProgram& ip);

}  // namespace greycone
