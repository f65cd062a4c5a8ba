#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "greycone/dut.hpp"

namespace greycone {

// Postfix bytecode for expressions. Each block's statements and
// terminator condition are flattened into ranges of one shared array.
struct Instr {
  enum class Kind : std::uint8_t { Const, Load, Unary, Binary };
  Kind kind = Kind::Const;
  Op op = Op::Add;
  IntType type;  // operand type for Unary/Binary
  std::uint32_t arg = 0;
};

struct CodeRange {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
};

struct CompiledAssign {
  std::uint32_t var = 0;
  CodeRange code;
};

struct CompiledBlock {
  std::vector<CompiledAssign> statements;
  Terminator::Kind term = Terminator::Kind::Return;
  CodeRange cond;
  BlockId target = kNoId;
  BlockId false_target = kNoId;
  EdgeId taken_edge = kNoId;
  EdgeId not_taken_edge = kNoId;
};

struct CompiledCode {
  std::vector<Instr> instrs;
  std::vector<CompiledBlock> blocks;
  std::uint32_t max_stack = 1;
};

std::shared_ptr<const CompiledCode> compile_program(const InstrumentedProgram& ip);

}  // namespace greycone
