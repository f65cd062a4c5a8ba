#include "greycone/solver.hpp"

#include <algorithm>
#include <numeric>

namespace greycone {

std::string_view status_name(SolverStatus s) {
  switch (s) {
    case SolverStatus::Sat: return "sat";
    case SolverStatus::Unsat: return "unsat";
    case SolverStatus::Timeout: return "timeout";
  }
  return "unsat";
}

std::optional<std::uint32_t> SolverResult::value(std::uint32_t index) const {
  for (const auto& m : model) {
    if (m.var.index == index) return m.value;
  }
  return std::nullopt;
}

// -- validation -------------------------------------------------------------

namespace {

bool valid_width(unsigned w) { return w == 8 || w == 16 || w == 32; }

[[noreturn]] void unsupported(const std::string& what) { throw UnsupportedExpr(what); }

}  // namespace

void validate(const SymNode& e) {
  auto need_child = [](const SymRef& c) {
    if (!c) unsupported("missing operand");
    validate(*c);
  };
  switch (e.kind) {
    case SymNode::Kind::Const:
      if (!e.type.is_bool() && !valid_width(e.type.width)) unsupported("bad constant width");
      if (e.value & ~width_mask(e.type.width)) unsupported("constant exceeds its width");
      return;
    case SymNode::Kind::Var:
      if (!valid_width(e.type.width)) unsupported("bad variable width for " + e.name);
      return;
    case SymNode::Kind::Unary:
      if (!is_unary(e.op)) unsupported("unary node with binary operator");
      need_child(e.a);
      if ((e.op == Op::LNot) != e.a->type.is_bool() || e.type != e.a->type) {
        unsupported("ill-typed unary node");
      }
      return;
    case SymNode::Kind::Binary:
    case SymNode::Kind::Compare:
    case SymNode::Kind::Logic: {
      need_child(e.a);
      need_child(e.b);
      if (e.a->type != e.b->type) unsupported("operand widths differ");
      const IntType t = e.a->type;
      if (e.kind == SymNode::Kind::Binary) {
        if (!is_arith(e.op) || t.is_bool() || e.type != t) unsupported("ill-typed arithmetic node");
      } else if (e.kind == SymNode::Kind::Compare) {
        if (!is_compare(e.op) || !e.type.is_bool()) unsupported("ill-typed comparison");
        if (t.is_bool() && e.op != Op::Eq && e.op != Op::Ne) unsupported("ordering on bool");
      } else {
        if (!is_logic(e.op) || !t.is_bool() || !e.type.is_bool()) unsupported("ill-typed logic node");
      }
      return;
    }
  }
  unsupported("unknown node kind");
}

bool can_trap(const SymNode& e) {
  if ((e.kind == SymNode::Kind::Binary) && (e.op == Op::Div || e.op == Op::Rem)) {
    if (!is_const(*e.b) || e.b->value == 0) return true;
  }
  return (e.a && can_trap(*e.a)) || (e.b && can_trap(*e.b));
}

// -- simplification ---------------------------------------------------------

namespace {

class Simplifier {
 public:
  std::uint64_t count = 0;

  SymRef root(Op op, const SymRef& a, const SymRef& b) {
    return b ? binary(op, a, b, nullptr) : unary(op, a, nullptr);
  }

  SymRef run(const SymRef& e) {
    switch (e->kind) {
      case SymNode::Kind::Const:
      case SymNode::Kind::Var:
        return e;
      case SymNode::Kind::Unary: {
        SymRef a = run(e->a);
        return unary(e->op, a, a == e->a ? e : nullptr);
      }
      default: {
        SymRef a = run(e->a);
        SymRef b = run(e->b);
        return binary(e->op, a, b, (a == e->a && b == e->b) ? e : nullptr);
      }
    }
  }

 private:
  SymRef hit(SymRef r) {
    ++count;
    return r;
  }

  SymRef unary(Op op, const SymRef& a, SymRef same) {
    if (is_const(*a)) return hit(sym_const(a->type, apply_unary(op, a->type, a->value)));
    if (a->kind == SymNode::Kind::Unary && a->op == op) return hit(a->a);
    if (op == Op::LNot && a->kind == SymNode::Kind::Compare) {
      return hit(binary(negate_compare(a->op), a->a, a->b, nullptr));
    }
    return same ? same : sym_unary(op, a);
  }

  static bool commutative(Op op) {
    return op == Op::Add || op == Op::Mul || op == Op::BitAnd || op == Op::BitOr ||
           op == Op::BitXor;
  }

  SymRef binary(Op op, SymRef a, SymRef b, SymRef same) {
    const IntType t = a->type;
    if (is_const(*a) && is_const(*b)) {
      if (auto v = apply_binary(op, t, a->value, b->value)) {
        return hit(sym_const(is_arith(op) ? t : kBool, *v));
      }
      return same ? same : sym_binary(op, a, b);
    }
    if (is_arith(op)) return arith(op, a, b, same);
    if (is_compare(op)) return compare(op, a, b, same);
    return logic(op, a, b, same);
  }

  SymRef arith(Op op, SymRef a, SymRef b, SymRef same) {
    const IntType t = a->type;
    const std::uint32_t mask = width_mask(t.width);
    if (commutative(op) && is_const(*a)) {
      return hit(arith(op, b, a, nullptr));
    }
    if (!is_const(*b)) return same ? same : sym_binary(op, a, b);
    if (op == Op::Sub) {
      return hit(arith(Op::Add, a, sym_const(t, 0u - b->value), nullptr));
    }
    const std::uint32_t c = b->value;
    const bool chain = a->kind == SymNode::Kind::Binary && a->op == op && is_const(*a->b);
    switch (op) {
      case Op::Add:
        if (c == 0) return hit(a);
        if (chain) return hit(arith(op, a->a, sym_const(t, a->b->value + c), nullptr));
        break;
      case Op::Mul:
        if (c == 1) return hit(a);
        if (c == 0 && !can_trap(*a)) return hit(sym_const(t, 0));
        if (chain) return hit(arith(op, a->a, sym_const(t, a->b->value * c), nullptr));
        break;
      case Op::BitAnd:
        if (c == mask) return hit(a);
        if (c == 0 && !can_trap(*a)) return hit(sym_const(t, 0));
        if (chain) return hit(arith(op, a->a, sym_const(t, a->b->value & c), nullptr));
        break;
      case Op::BitOr:
        if (c == 0) return hit(a);
        if (chain) return hit(arith(op, a->a, sym_const(t, a->b->value | c), nullptr));
        break;
      case Op::BitXor:
        if (c == 0) return hit(a);
        if (chain) return hit(arith(op, a->a, sym_const(t, a->b->value ^ c), nullptr));
        break;
      case Op::Shl:
      case Op::Shr:
        if (c == 0) return hit(a);
        break;
      case Op::Div:
        if (c == 1) return hit(a);
        break;
      case Op::Rem:
        if (c == 1 && !can_trap(*a)) return hit(sym_const(t, 0));
        break;
      default:
        break;
    }
    return same ? same : sym_binary(op, a, b);
  }

  SymRef compare(Op op, SymRef a, SymRef b, SymRef same) {
    const IntType t = a->type;
    if (is_const(*a)) return hit(compare(swap_compare(op), b, a, nullptr));
    if (!is_const(*b)) return same ? same : sym_binary(op, a, b);
    const std::uint32_t c = b->value;
    if (op == Op::Eq || op == Op::Ne) {
      if (t.is_bool()) {
        const bool keep = (op == Op::Eq) == (c != 0);
        return hit(keep ? a : unary(Op::LNot, a, nullptr));
      }
      if (a->kind == SymNode::Kind::Binary && is_const(*a->b)) {
        if (a->op == Op::Add) {
          return hit(compare(op, a->a, sym_const(t, c - a->b->value), nullptr));
        }
        if (a->op == Op::BitXor) {
          return hit(compare(op, a->a, sym_const(t, c ^ a->b->value), nullptr));
        }
      }
      if (a->kind == SymNode::Kind::Unary && a->op == Op::Neg) {
        return hit(compare(op, a->a, sym_const(t, 0u - c), nullptr));
      }
      if (a->kind == SymNode::Kind::Unary && a->op == Op::BitNot) {
        return hit(compare(op, a->a, sym_const(t, ~c), nullptr));
      }
    } else if (!can_trap(*a)) {
      const std::int64_t v = to_numeric(c, t);
      if ((op == Op::Lt && v == type_min(t)) || (op == Op::Gt && v == type_max(t))) {
        return hit(sym_bool(false));
      }
      if ((op == Op::Ge && v == type_min(t)) || (op == Op::Le && v == type_max(t))) {
        return hit(sym_bool(true));
      }
    }
    return same ? same : sym_binary(op, a, b);
  }

  SymRef logic(Op op, SymRef a, SymRef b, SymRef same) {
    const bool is_and = op == Op::LAnd;
    // Neutral element drops out; the absorbing one wins when the other
    // side cannot trap.
    auto neutral = [&](const SymNode& n) { return is_and ? is_true(n) : is_false(n); };
    auto absorbing = [&](const SymNode& n) { return is_and ? is_false(n) : is_true(n); };
    if (neutral(*a)) return hit(b);
    if (neutral(*b)) return hit(a);
    if (absorbing(*a) && !can_trap(*b)) return hit(a);
    if (absorbing(*b) && !can_trap(*a)) return hit(b);
    return same ? same : sym_binary(op, a, b);
  }
};

}  // namespace

SymRef simplify(const SymRef& e, std::uint64_t* count) {
  Simplifier s;
  SymRef r = s.run(e);
  if (count) *count += s.count;
  return r;
}

SymRef build_simplified(Op op, const SymRef& a, const SymRef& b) {
  if (!a || (!is_unary(op) && !b)) throw std::invalid_argument("build_simplified: missing operand");
  return Simplifier().root(op, a, b);
}

// -- search -----------------------------------------------------------------

namespace {

using i128 = __int128;

// Arithmetic progression {first + i*step : 0 <= i < count} of numeric values.
struct Domain {
  std::int64_t first = 0;
  std::int64_t step = 1;
  std::int64_t count = 0;

  std::int64_t lo() const { return first; }
  std::int64_t hi() const { return first + (count - 1) * step; }
  bool contains(std::int64_t v) const {
    return count > 0 && v >= lo() && v <= hi() && (v - first) % step == 0;
  }
};

struct Ival {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool may_trap = false;
  bool must_trap = false;

  bool single() const { return lo == hi; }
};

Ival full(IntType t) { return {type_min(t), type_max(t)}; }

// Interval hull of the values in [lo, hi] after wrapping to `t`.
Ival wrap(i128 lo, i128 hi, IntType t) {
  const i128 span = hi - lo;
  if (span >= (i128{1} << t.width)) return full(t);
  const auto wl = to_numeric(static_cast<std::uint32_t>(static_cast<std::uint64_t>(lo)), t);
  const auto wh = to_numeric(static_cast<std::uint32_t>(static_cast<std::uint64_t>(hi)), t);
  if (wl > wh) return full(t);
  return {wl, wh};
}

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

class Search {
 public:
  Search(std::vector<SymRef> conjuncts, std::vector<VarInfo> vars, const SolveOptions& opt)
      : conjuncts_(std::move(conjuncts)), vars_(std::move(vars)), opt_(opt) {
    std::uint32_t max_index = 0;
    for (const auto& v : vars_) max_index = std::max(max_index, v.index);
    slot_.assign(vars_.empty() ? 0 : max_index + 1, 0);
    for (std::size_t i = 0; i < vars_.size(); ++i) slot_[vars_[i].index] = i;
    lo_.resize(vars_.size());
    hi_.resize(vars_.size());
    step_.assign(vars_.size(), 1);
    residue_.assign(vars_.size(), 0);
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      lo_[i] = type_min(vars_[i].type);
      hi_[i] = type_max(vars_[i].type);
    }
    hint_tried_.assign(vars_.size(), false);
  }

  // Returns false when propagation proves the conjunction unsatisfiable.
  bool propagate() {
    for (const auto& c : conjuncts_) {
      if (!absorb(*c)) return false;
    }
    dom_.resize(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      Domain& d = dom_[i];
      d.step = step_[i];
      d.first = lo_[i] + floor_mod(residue_[i] - lo_[i], step_[i]);
      if (d.first > hi_[i]) return false;
      d.count = (hi_[i] - d.first) / d.step + 1;
    }
    return true;
  }

  SolverStatus run() { return dfs(); }

  std::uint64_t nodes() const { return nodes_; }
  const std::vector<std::int64_t>& model() const { return model_; }

 private:
  // -- propagation of single-variable facts --

  bool absorb(const SymNode& c) {
    if (c.kind != SymNode::Kind::Compare || !is_const(*c.b)) return true;
    const SymNode& a = *c.a;
    const IntType t = c.operand_type;
    const std::int64_t k = to_numeric(c.b->value, t);
    if (a.kind == SymNode::Kind::Var) {
      const std::size_t s = slot_[a.var];
      std::int64_t& lo = lo_[s];
      std::int64_t& hi = hi_[s];
      switch (c.op) {
        case Op::Eq: lo = std::max(lo, k); hi = std::min(hi, k); break;
        case Op::Lt: hi = std::min(hi, k - 1); break;
        case Op::Le: hi = std::min(hi, k); break;
        case Op::Gt: lo = std::max(lo, k + 1); break;
        case Op::Ge: lo = std::max(lo, k); break;
        case Op::Ne:
          if (lo == k) ++lo;
          if (hi == k) --hi;
          break;
        default: break;
      }
      return lo <= hi;
    }
    if (c.op == Op::Eq && a.kind == SymNode::Kind::Binary && a.op == Op::Rem &&
        a.a->kind == SymNode::Kind::Var && is_const(*a.b)) {
      return absorb_residue(slot_[a.a->var], t, to_numeric(a.b->value, t), k);
    }
    return true;
  }

  // x % m == r under truncating remainder semantics.
  bool absorb_residue(std::size_t s, IntType t, std::int64_t m, std::int64_t r) {
    if (m == 0) return false;  // always traps
    const std::int64_t mm = m < 0 ? -m : m;
    if (r >= mm || r <= -mm) return false;
    if (!t.is_signed && r < 0) return false;
    if (r > 0) lo_[s] = std::max<std::int64_t>(lo_[s], 1);
    if (r < 0) hi_[s] = std::min<std::int64_t>(hi_[s], -1);
    const std::int64_t want = floor_mod(r, mm);
    // Merge with the residue already known for this variable.
    const std::int64_t g = std::gcd(step_[s], mm);
    const i128 lcm = i128{step_[s]} / g * mm;
    if (mm > (1 << 20) || lcm > (i128{1} << 33)) return lo_[s] <= hi_[s];
    bool found = false;
    for (std::int64_t i = 0; i < mm / g; ++i) {
      const std::int64_t x = residue_[s] + i * step_[s];
      if (floor_mod(x, mm) == want) {
        residue_[s] = floor_mod(x, static_cast<std::int64_t>(lcm));
        found = true;
        break;
      }
    }
    if (!found) return false;
    step_[s] = static_cast<std::int64_t>(lcm);
    return lo_[s] <= hi_[s];
  }

  // -- interval evaluation --

  Ival eval(const SymNode& n) const {
    switch (n.kind) {
      case SymNode::Kind::Const: {
        const auto v = to_numeric(n.value, n.type);
        return {v, v};
      }
      case SymNode::Kind::Var: {
        const Domain& d = dom_[slot_[n.var]];
        return {d.lo(), d.hi()};
      }
      case SymNode::Kind::Unary: {
        Ival a = eval(*n.a);
        Ival r;
        const IntType t = n.operand_type;
        switch (n.op) {
          case Op::Neg: r = wrap(-i128{a.hi}, -i128{a.lo}, t); break;
          case Op::BitNot: r = wrap(-i128{a.hi} - 1, -i128{a.lo} - 1, t); break;
          default: r = {1 - a.hi, 1 - a.lo}; break;
        }
        r.may_trap = a.may_trap;
        r.must_trap = a.must_trap;
        return r;
      }
      default:
        break;
    }
    const Ival a = eval(*n.a);
    const Ival b = eval(*n.b);
    Ival r = binary(n.op, n.operand_type, a, b);
    r.may_trap = r.may_trap || a.may_trap || b.may_trap;
    r.must_trap = r.must_trap || a.must_trap || b.must_trap;
    if (r.must_trap) r.may_trap = true;
    return r;
  }

  static Ival binary(Op op, IntType t, const Ival& a, const Ival& b) {
    if (a.single() && b.single()) {
      auto v = apply_binary(op, t, truncate(static_cast<std::uint64_t>(a.lo), t),
                            truncate(static_cast<std::uint64_t>(b.lo), t));
      if (!v) return {0, 0, true, true};
      const IntType rt = is_arith(op) ? t : kBool;
      const auto x = to_numeric(*v, rt);
      return {x, x};
    }
    switch (op) {
      case Op::Add: return wrap(i128{a.lo} + b.lo, i128{a.hi} + b.hi, t);
      case Op::Sub: return wrap(i128{a.lo} - b.hi, i128{a.hi} - b.lo, t);
      case Op::Mul: {
        const i128 c[4] = {i128{a.lo} * b.lo, i128{a.lo} * b.hi, i128{a.hi} * b.lo,
                           i128{a.hi} * b.hi};
        return wrap(*std::min_element(c, c + 4), *std::max_element(c, c + 4), t);
      }
      case Op::Div:
      case Op::Rem: return divide(op, t, a, b);
      case Op::BitAnd:
      case Op::BitOr:
      case Op::BitXor: {
        if (a.lo < 0 || b.lo < 0) return full(t);
        const std::int64_t top = std::max(a.hi, b.hi);
        std::int64_t p = 1;
        while (p <= top) p <<= 1;
        if (op == Op::BitAnd) return {0, std::min(a.hi, b.hi)};
        if (op == Op::BitOr) return {std::max(a.lo, b.lo), p - 1};
        return {0, p - 1};
      }
      case Op::Shl: {
        if (!b.single()) return full(t);
        const auto s = truncate(static_cast<std::uint64_t>(b.lo), t);
        if (s >= t.width) return {0, 0};
        return wrap(i128{a.lo} << s, i128{a.hi} << s, t);
      }
      case Op::Shr: {
        if (!b.single()) {
          if (a.lo >= 0) return {0, a.hi};
          if (!t.is_signed) return full(t);
          return {a.lo, std::max<std::int64_t>(a.hi, 0)};
        }
        const auto s = truncate(static_cast<std::uint64_t>(b.lo), t);
        if (s >= t.width) {
          if (!t.is_signed) return {0, 0};
          return {a.lo < 0 ? -1 : 0, a.hi < 0 ? -1 : 0};
        }
        return {a.lo >> s, a.hi >> s};
      }
      default:
        break;
    }
    return compare(op, a, b);
  }

  static Ival compare(Op op, const Ival& a, const Ival& b) {
    auto tri = [](bool yes, bool no) -> Ival {
      if (yes) return {1, 1};
      if (no) return {0, 0};
      return {0, 1};
    };
    switch (op) {
      case Op::Eq: return tri(a.single() && b.single() && a.lo == b.lo, a.hi < b.lo || b.hi < a.lo);
      case Op::Ne: return tri(a.hi < b.lo || b.hi < a.lo, a.single() && b.single() && a.lo == b.lo);
      case Op::Lt: return tri(a.hi < b.lo, a.lo >= b.hi);
      case Op::Le: return tri(a.hi <= b.lo, a.lo > b.hi);
      case Op::Gt: return tri(a.lo > b.hi, a.hi <= b.lo);
      case Op::Ge: return tri(a.lo >= b.hi, a.hi < b.lo);
      case Op::LAnd: return tri(a.lo == 1 && b.lo == 1, a.hi == 0 || b.hi == 0);
      case Op::LOr: return tri(a.lo == 1 || b.lo == 1, a.hi == 0 && b.hi == 0);
      default: break;
    }
    return {0, 1};
  }

  static Ival divide(Op op, IntType t, const Ival& a, const Ival& b) {
    Ival out;
    bool any = false;
    auto join = [&](const Ival& r) {
      if (!any) {
        out = r;
        any = true;
      } else {
        out.lo = std::min(out.lo, r.lo);
        out.hi = std::max(out.hi, r.hi);
      }
    };
    auto part = [&](std::int64_t lo, std::int64_t hi) {
      if (lo > hi) return;
      if (op == Op::Div) {
        const i128 c[4] = {i128{a.lo} / lo, i128{a.lo} / hi, i128{a.hi} / lo, i128{a.hi} / hi};
        join(wrap(*std::min_element(c, c + 4), *std::max_element(c, c + 4), t));
        return;
      }
      const std::int64_t mag_lo = std::min(lo < 0 ? -hi : lo, lo < 0 ? -lo : hi);
      const std::int64_t m = std::max(lo < 0 ? -lo : hi, lo < 0 ? -hi : lo) - 1;
      if (a.lo >= 0) {
        join(a.hi < mag_lo ? Ival{a.lo, a.hi} : Ival{0, std::min(a.hi, m)});
      } else if (a.hi <= 0) {
        join(-a.lo < mag_lo ? Ival{a.lo, a.hi} : Ival{std::max(a.lo, -m), 0});
      } else {
        join({std::max(a.lo, -m), std::min(a.hi, m)});
      }
    };
    part(b.lo, std::min<std::int64_t>(b.hi, -1));
    part(std::max<std::int64_t>(b.lo, 1), b.hi);
    const bool zero = b.lo <= 0 && b.hi >= 0;
    if (!any) return {0, 0, true, true};
    out.may_trap = zero;
    return out;
  }

  // -- backtracking --

  std::optional<std::int64_t> hint_for(std::size_t s) const {
    if (!opt_.hint || vars_[s].index >= opt_.hint->size()) return std::nullopt;
    return to_numeric((*opt_.hint)[vars_[s].index], vars_[s].type);
  }

  SolverStatus dfs() {
    if (++nodes_ > opt_.budget) return SolverStatus::Timeout;
    bool all_true = true;
    for (const auto& c : conjuncts_) {
      const Ival v = eval(*c);
      if (v.must_trap || v.hi == 0) return SolverStatus::Unsat;
      if (v.may_trap || v.lo != 1) all_true = false;
    }
    if (all_true) {
      model_.resize(vars_.size());
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        const auto h = hint_for(i);
        model_[i] = h && dom_[i].contains(*h) ? *h : dom_[i].first;
      }
      return SolverStatus::Sat;
    }
    std::size_t pick = vars_.size();
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (dom_[i].count > 1 && (pick == vars_.size() || dom_[i].count < dom_[pick].count)) {
        pick = i;
      }
    }
    if (pick == vars_.size()) return SolverStatus::Unsat;

    const Domain saved = dom_[pick];
    const bool tried = hint_tried_[pick];
    SolverStatus r = SolverStatus::Unsat;
    if (!tried) {
      if (auto h = hint_for(pick); h && saved.contains(*h)) {
        hint_tried_[pick] = true;
        dom_[pick] = {*h, saved.step, 1};
        r = dfs();
        if (r != SolverStatus::Unsat) return r;
      }
    }
    const std::int64_t low_count = (saved.count + 1) / 2;
    dom_[pick] = {saved.first, saved.step, low_count};
    r = dfs();
    if (r == SolverStatus::Unsat) {
      dom_[pick] = {saved.first + low_count * saved.step, saved.step, saved.count - low_count};
      r = dfs();
    }
    dom_[pick] = saved;
    hint_tried_[pick] = tried;
    return r;
  }

  std::vector<SymRef> conjuncts_;
  std::vector<VarInfo> vars_;
  SolveOptions opt_;
  std::vector<std::size_t> slot_;
  std::vector<std::int64_t> lo_, hi_, step_, residue_;
  std::vector<Domain> dom_;
  std::vector<bool> hint_tried_;
  std::vector<std::int64_t> model_;
  std::uint64_t nodes_ = 0;
};

void flatten(const SymRef& e, std::vector<SymRef>& out) {
  if (e->kind == SymNode::Kind::Logic && e->op == Op::LAnd) {
    flatten(e->a, out);
    flatten(e->b, out);
  } else {
    out.push_back(e);
  }
}

}  // namespace

SolverResult solve(const std::vector<SymRef>& conjuncts, const SolveOptions& opt) {
  SolverResult res;
  for (const auto& c : conjuncts) {
    if (!c) unsupported("missing conjunct");
    validate(*c);
    if (!c->type.is_bool()) unsupported("conjunct is not boolean");
  }

  std::vector<SymRef> work;
  for (const auto& c : conjuncts) flatten(simplify(c, &res.stats.simplifications), work);
  std::vector<SymRef> live;
  for (auto& c : work) {
    if (is_false(*c)) return res;
    if (!is_true(*c)) live.push_back(std::move(c));
  }
  // p and (not p) side by side
  for (std::size_t i = 0; i < live.size(); ++i) {
    const SymRef neg = simplify(sym_not(live[i]));
    for (std::size_t k = i + 1; k < live.size(); ++k) {
      if (sym_equal(*neg, *live[k])) return res;
    }
  }

  std::vector<VarInfo> vars;
  for (const auto& c : conjuncts) collect_vars(*c, vars);

  Search search(live, vars, opt);
  if (!search.propagate()) {
    res.stats.nodes_explored = 1;
    return res;
  }
  res.status = search.run();
  res.stats.nodes_explored = search.nodes();
  if (res.status != SolverStatus::Sat) return res;

  std::vector<std::uint32_t> env(vars.empty() ? 0 : vars.back().index + 1, 0);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto bits = truncate(static_cast<std::uint64_t>(search.model()[i]), vars[i].type);
    env[vars[i].index] = bits;
    res.model.push_back({vars[i], bits});
  }
  for (const auto& c : conjuncts) {
    auto v = eval(*c, env);
    if (!v || !*v) throw std::logic_error("solver model fails verification: " + to_sexp(*c));
  }
  return res;
}

}  // namespace greycone
