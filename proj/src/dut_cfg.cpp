#include <functional>
#include <optional>
#include <sstream>

#include "compiled_code.hpp"
#include "dut_lowering.hpp"
#include "greycone/dut.hpp"

namespace greycone {

namespace {

class Lowering {
 public:
  explicit Lowering(Program& p) : p_(p) {}

  void run() {
    BlockId cur = new_block();
    cur = lower_list(p_.body, cur);
    if (!terminated_[cur]) {
      blocks_[cur].term.kind = Terminator::Kind::Return;
      terminated_[cur] = true;
    }
    compact();
  }

 private:
  BlockId new_block() {
    const auto id = static_cast<BlockId>(blocks_.size());
    blocks_.push_back(BasicBlock{id, {}, {}});
    terminated_.push_back(false);
    return id;
  }

  void seal(BlockId b, Terminator t) {
    blocks_[b].term = std::move(t);
    terminated_[b] = true;
  }

  void jump(BlockId from, BlockId to, SourceLoc loc) {
    if (terminated_[from]) return;
    Terminator t;
    t.kind = Terminator::Kind::Goto;
    t.target = to;
    t.loc = loc;
    seal(from, t);
  }

  BlockId lower_list(const StmtList& list, BlockId cur) {
    for (const auto& s : list) cur = lower(*s, cur);
    return cur;
  }

  BlockId lower(const Stmt& s, BlockId cur) {
    switch (s.kind) {
      case Stmt::Kind::Assign:
        blocks_[cur].statements.push_back({s.var, s.expr, s.loc});
        return cur;
      case Stmt::Kind::Return:
      case Stmt::Kind::Fail: {
        Terminator t;
        t.kind = s.kind == Stmt::Kind::Return ? Terminator::Kind::Return
                                              : Terminator::Kind::Fail;
        t.loc = s.loc;
        seal(cur, t);
        return new_block();  // anything after this point is dead code
      }
      case Stmt::Kind::If: {
        const BlockId then_b = new_block();
        const BlockId else_b = s.has_else ? new_block() : kNoId;
        const BlockId join = new_block();
        Terminator t;
        t.kind = Terminator::Kind::CondBranch;
        t.cond = s.expr;
        t.target = then_b;
        t.false_target = s.has_else ? else_b : join;
        t.loc = s.loc;
        seal(cur, t);
        jump(lower_list(s.body, then_b), join, s.loc);
        if (s.has_else) jump(lower_list(s.orelse, else_b), join, s.loc);
        return join;
      }
      case Stmt::Kind::While: {
        const BlockId header = new_block();
        jump(cur, header, s.loc);
        const BlockId body = new_block();
        const BlockId exit = new_block();
        Terminator t;
        t.kind = Terminator::Kind::CondBranch;
        t.cond = s.expr;
        t.target = body;
        t.false_target = exit;
        t.loc = s.loc;
        seal(header, t);
        jump(lower_list(s.body, body), header, s.loc);
        return exit;
      }
    }
    return cur;
  }

  void compact() {
    std::vector<BlockId> remap(blocks_.size(), kNoId);
    std::vector<bool> seen(blocks_.size(), false);
    std::vector<BlockId> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const BlockId b = stack.back();
      stack.pop_back();
      const auto& t = blocks_[b].term;
      for (BlockId s : {t.target, t.false_target}) {
        if (s != kNoId && !seen[s]) {
          seen[s] = true;
          stack.push_back(s);
        }
      }
    }
    BlockId next = 0;
    for (BlockId b = 0; b < blocks_.size(); ++b) {
      if (seen[b]) remap[b] = next++;
    }
    p_.blocks.clear();
    for (BlockId b = 0; b < blocks_.size(); ++b) {
      if (!seen[b]) continue;
      BasicBlock blk = std::move(blocks_[b]);
      blk.id = remap[b];
      if (blk.term.target != kNoId) blk.term.target = remap[blk.term.target];
      if (blk.term.false_target != kNoId) {
        blk.term.false_target = remap[blk.term.false_target];
      }
      p_.blocks.push_back(std::move(blk));
    }
    p_.entry = 0;
  }

  Program& p_;
  std::vector<BasicBlock> blocks_;
  std::vector<bool> terminated_;
};

// -- printing ---------------------------------------------------------------

void print_expr(std::ostream& os, const Program& p, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Const:
      if (e.type.is_bool()) {
        os << (e.value ? "true" : "false");
      } else {
        os << to_numeric(e.value, e.type);
      }
      return;
    case Expr::Kind::Var:
      os << p.vars[e.var].name;
      return;
    case Expr::Kind::Unary:
      os << op_symbol(e.op) << "(";
      print_expr(os, p, *e.lhs);
      os << ")";
      return;
    case Expr::Kind::Binary:
      os << "(";
      print_expr(os, p, *e.lhs);
      os << " " << op_symbol(e.op) << " ";
      print_expr(os, p, *e.rhs);
      os << ")";
      return;
  }
}

// Fully typed rendering used for structural comparison.
void dump_expr(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Const:
      os << e.value << ":" << type_name(e.type);
      return;
    case Expr::Kind::Var:
      os << "$" << e.var;
      return;
    case Expr::Kind::Unary:
      os << "(" << op_mnemonic(e.op) << " ";
      dump_expr(os, *e.lhs);
      os << ")";
      return;
    case Expr::Kind::Binary:
      os << "(" << op_mnemonic(e.op) << ":" << type_name(e.operand_type) << " ";
      dump_expr(os, *e.lhs);
      os << " ";
      dump_expr(os, *e.rhs);
      os << ")";
      return;
  }
}

void print_stmts(std::ostream& os, const Program& p, const StmtList& list,
                 int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  for (const auto& s : list) {
    switch (s->kind) {
      case Stmt::Kind::Assign:
        os << pad << p.vars[s->var].name << " = ";
        print_expr(os, p, *s->expr);
        os << ";\n";
        break;
      case Stmt::Kind::Return: os << pad << "return;\n"; break;
      case Stmt::Kind::Fail: os << pad << "fail;\n"; break;
      case Stmt::Kind::If:
        os << pad << "if (";
        print_expr(os, p, *s->expr);
        os << ") {\n";
        print_stmts(os, p, s->body, depth + 1);
        os << pad << "}";
        if (s->has_else) {
          os << " else {\n";
          print_stmts(os, p, s->orelse, depth + 1);
          os << pad << "}";
        }
        os << "\n";
        break;
      case Stmt::Kind::While:
        os << pad << "while (";
        print_expr(os, p, *s->expr);
        os << ") {\n";
        print_stmts(os, p, s->body, depth + 1);
        os << pad << "}\n";
        break;
    }
  }
}

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (i * 8)) & 0xFFu;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

void lower_to_cfg(Program& p) { Lowering(p).run(); }

std::string pretty_print(const Program& p) {
  std::ostringstream os;
  for (const auto& in : p.inputs) {
    os << "input " << type_name(in.type) << " " << in.name
       << (in.symbolic ? " symbolic" : "") << ";\n";
  }
  for (const auto& v : p.vars) {
    if (!v.is_input) os << type_name(v.type) << " " << v.name << ";\n";
  }
  print_stmts(os, p, p.body, 0);
  return os.str();
}

std::string dump_cfg(const Program& p) {
  std::ostringstream os;
  for (const auto& in : p.inputs) {
    os << "input " << in.name << ":" << type_name(in.type)
       << (in.symbolic ? " sym" : "") << " @" << in.byte_offset << "\n";
  }
  for (const auto& v : p.vars) {
    if (!v.is_input) os << "local " << v.name << ":" << type_name(v.type) << "\n";
  }
  for (const auto& b : p.blocks) {
    os << "b" << b.id << ":\n";
    for (const auto& a : b.statements) {
      os << "  $" << a.var << " = ";
      dump_expr(os, *a.value);
      os << "\n";
    }
    switch (b.term.kind) {
      case Terminator::Kind::Goto: os << "  goto b" << b.term.target; break;
      case Terminator::Kind::Return: os << "  return"; break;
      case Terminator::Kind::Fail: os << "  fail"; break;
      case Terminator::Kind::CondBranch:
        os << "  br ";
        dump_expr(os, *b.term.cond);
        os << " b" << b.term.target << " b" << b.term.false_target;
        break;
    }
    os << "\n";
  }
  return os.str();
}

InstrumentedProgram instrument(const Program& p) {
  InstrumentedProgram ip;
  ip.program = p;
  ip.block_edges.assign(p.blocks.size(), BlockEdges{});
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto add = [&](BlockId from, BlockId to, bool branch) {
    const auto id = static_cast<EdgeId>(ip.edges.size());
    ip.edges.push_back({from, to, branch});
    if (branch) ++ip.branch_edge_count;
    h = fnv1a(fnv1a(fnv1a(h, id), from), to);
    return id;
  };
  for (const auto& b : p.blocks) {
    switch (b.term.kind) {
      case Terminator::Kind::Goto:
        ip.block_edges[b.id].taken = add(b.id, b.term.target, false);
        break;
      case Terminator::Kind::CondBranch:
        ip.block_edges[b.id].taken = add(b.id, b.term.target, true);
        ip.block_edges[b.id].not_taken = add(b.id, b.term.false_target, true);
        break;
      default:
        break;
    }
  }
  ip.edge_table_hash = h;
  ip.code = compile_program(ip);
  return ip;
}

std::vector<BranchSite> branch_sites(const InstrumentedProgram& ip) {
  std::vector<BranchSite> out;
  for (const auto& b : ip.program.blocks) {
    if (b.term.kind != Terminator::Kind::CondBranch) continue;
    out.push_back({b.id, ip.block_edges[b.id].taken, ip.block_edges[b.id].not_taken,
                   b.term.loc.line});
  }
  return out;
}

}  // namespace greycone
