#include "greycone/exec.hpp"

#include <algorithm>
#include <functional>

#include "compiled_code.hpp"

namespace greycone {

std::string_view origin_tag(Origin o) {
  switch (o) {
    case Origin::Initial: return "initial";
    case Origin::FuzzMutation: return "fuzz";
    case Origin::ConcolicSolver: return "concolic";
  }
  return "initial";
}

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Returned: return "returned";
    case Outcome::Failed: return "failed";
    case Outcome::StepLimit: return "step-limit";
  }
  return "returned";
}

std::size_t ExecResult::branch_edges_hit(const InstrumentedProgram& ip) const {
  std::size_t n = 0;
  for (std::size_t e = 0; e < edge_hits.size(); ++e) {
    if (edge_hits[e] && ip.edges[e].is_branch) ++n;
  }
  return n;
}

std::uint64_t ExecResult::total_hits() const {
  std::uint64_t n = 0;
  for (auto h : edge_hits) n += h;
  return n;
}

std::vector<std::uint8_t> normalize_input(const Program& p,
                                          std::span<const std::uint8_t> bytes) {
  std::vector<std::uint8_t> out(p.input_bytes(), 0);
  std::copy_n(bytes.begin(), std::min(bytes.size(), out.size()), out.begin());
  return out;
}

std::vector<std::uint32_t> decode_inputs(const Program& p,
                                         std::span<const std::uint8_t> bytes) {
  std::vector<std::uint32_t> values(p.vars.size(), 0);
  for (std::size_t i = 0; i < p.inputs.size(); ++i) {
    const auto& in = p.inputs[i];
    std::uint32_t v = 0;
    for (std::size_t k = 0; k < in.bytes(); ++k) {
      const std::size_t at = in.byte_offset + k;
      const std::uint32_t byte = at < bytes.size() ? bytes[at] : 0;
      v |= byte << (8 * k);
    }
    values[i] = v;
  }
  return values;
}

void encode_input(const Program& p, std::size_t index, std::uint32_t value,
                  std::vector<std::uint8_t>& bytes) {
  const auto& in = p.inputs.at(index);
  if (bytes.size() < p.input_bytes()) bytes.resize(p.input_bytes(), 0);
  for (std::size_t k = 0; k < in.bytes(); ++k) {
    bytes[in.byte_offset + k] = static_cast<std::uint8_t>(value >> (8 * k));
  }
}

// -- bytecode ---------------------------------------------------------------

namespace {

class Compiler {
 public:
  explicit Compiler(CompiledCode& out) : out_(out) {}

  CodeRange emit(const Expr& e) {
    CodeRange r;
    r.begin = static_cast<std::uint32_t>(out_.instrs.size());
    depth_ = 0;
    walk(e);
    r.end = static_cast<std::uint32_t>(out_.instrs.size());
    return r;
  }

 private:
  void push(Instr i, int delta) {
    out_.instrs.push_back(i);
    depth_ += delta;
    out_.max_stack = std::max<std::uint32_t>(out_.max_stack, depth_);
  }

  void walk(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Const:
        push({Instr::Kind::Const, Op::Add, e.type, e.value}, 1);
        return;
      case Expr::Kind::Var:
        push({Instr::Kind::Load, Op::Add, e.type, e.var}, 1);
        return;
      case Expr::Kind::Unary:
        walk(*e.lhs);
        push({Instr::Kind::Unary, e.op, e.operand_type, 0}, 0);
        return;
      case Expr::Kind::Binary:
        walk(*e.lhs);
        walk(*e.rhs);
        push({Instr::Kind::Binary, e.op, e.operand_type, 0}, -1);
        return;
    }
  }

  CompiledCode& out_;
  std::uint32_t depth_ = 0;
};

// Returns false when the expression traps.
inline bool eval_code(const CompiledCode& code, CodeRange r,
                      const std::uint32_t* vars, std::uint32_t* stack,
                      std::uint32_t& result) {
  std::uint32_t sp = 0;
  for (std::uint32_t pc = r.begin; pc < r.end; ++pc) {
    const Instr& in = code.instrs[pc];
    switch (in.kind) {
      case Instr::Kind::Const: stack[sp++] = in.arg; break;
      case Instr::Kind::Load: stack[sp++] = vars[in.arg]; break;
      case Instr::Kind::Unary:
        stack[sp - 1] = apply_unary(in.op, in.type, stack[sp - 1]);
        break;
      case Instr::Kind::Binary: {
        auto v = apply_binary(in.op, in.type, stack[sp - 2], stack[sp - 1]);
        if (!v) return false;
        stack[sp - 2] = *v;
        --sp;
        break;
      }
    }
  }
  result = stack[0];
  return true;
}

}  // namespace

std::shared_ptr<const CompiledCode> compile_program(const InstrumentedProgram& ip) {
  auto code = std::make_shared<CompiledCode>();
  Compiler c(*code);
  for (const auto& b : ip.program.blocks) {
    CompiledBlock cb;
    for (const auto& a : b.statements) cb.statements.push_back({a.var, c.emit(*a.value)});
    cb.term = b.term.kind;
    if (b.term.kind == Terminator::Kind::CondBranch) cb.cond = c.emit(*b.term.cond);
    cb.target = b.term.target;
    cb.false_target = b.term.false_target;
    cb.taken_edge = ip.block_edges[b.id].taken;
    cb.not_taken_edge = ip.block_edges[b.id].not_taken;
    code->blocks.push_back(std::move(cb));
  }
  return code;
}

ExecResult run_concrete(const InstrumentedProgram& ip,
                        std::span<const std::uint8_t> bytes,
                        std::uint64_t step_limit) {
  const CompiledCode& code = *ip.code;
  ExecResult r;
  r.edge_hits.assign(ip.edges.size(), 0);
  r.values = decode_inputs(ip.program, bytes);
  std::vector<std::uint32_t> stack(code.max_stack + 1);
  std::vector<bool> visited(code.blocks.size(), false);

  BlockId b = ip.program.entry;
  for (;;) {
    if (!visited[b]) {
      visited[b] = true;
      ++r.depth;
    }
    const CompiledBlock& blk = code.blocks[b];
    for (const auto& a : blk.statements) {
      if (r.steps >= step_limit) {
        r.outcome = Outcome::StepLimit;
        return r;
      }
      ++r.steps;
      std::uint32_t v = 0;
      if (!eval_code(code, a.code, r.values.data(), stack.data(), v)) {
        r.outcome = Outcome::Failed;
        return r;
      }
      r.values[a.var] = v;
    }
    if (r.steps >= step_limit) {
      r.outcome = Outcome::StepLimit;
      return r;
    }
    ++r.steps;
    switch (blk.term) {
      case Terminator::Kind::Return:
        r.outcome = Outcome::Returned;
        return r;
      case Terminator::Kind::Fail:
        r.outcome = Outcome::Failed;
        return r;
      case Terminator::Kind::Goto:
        ++r.edge_hits[blk.taken_edge];
        b = blk.target;
        break;
      case Terminator::Kind::CondBranch: {
        std::uint32_t c = 0;
        if (!eval_code(code, blk.cond, r.values.data(), stack.data(), c)) {
          r.outcome = Outcome::Failed;
          return r;
        }
        if (c) {
          ++r.edge_hits[blk.taken_edge];
          b = blk.target;
        } else {
          ++r.edge_hits[blk.not_taken_edge];
          b = blk.false_target;
        }
        break;
      }
    }
  }
}

}  // namespace greycone
