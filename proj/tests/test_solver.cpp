#include <doctest.h>

#include "greycone/solver.hpp"
#include "support.hpp"

using namespace gtest;

namespace {

bool holds(const std::vector<SymRef>& cs, const std::vector<std::uint32_t>& env) {
  for (const auto& c : cs) {
    auto v = eval(*c, env);
    if (!v || !*v) return false;
  }
  return true;
}

std::vector<std::uint32_t> model_env(const SolverResult& r, std::size_t vars) {
  std::vector<std::uint32_t> env(vars, 0);
  for (const auto& m : r.model) env[m.var.index] = m.value;
  return env;
}

SymRef num(IntType t, std::int64_t v) { return sym_const(t, truncate(static_cast<std::uint64_t>(v), t)); }

}  // namespace

TEST_CASE("simplify examples") {
  const auto five = simplify(sym_binary(Op::Add, sym_const(kU8, 2), sym_const(kU8, 3)));
  CHECK(to_sexp(*five) == "(const u8 5)");
  const auto a = sym_var(0, "a", kU16);
  const auto p = sym_binary(Op::Lt, a, sym_const(kU16, 9));
  CHECK(sym_equal(*simplify(sym_not(sym_not(p))), *p));
  const auto ident = sym_binary(Op::Mul, sym_binary(Op::Add, a, sym_const(kU16, 0)), sym_const(kU16, 1));
  std::uint64_t count = 0;
  CHECK(sym_equal(*simplify(ident, &count), *a));
  CHECK(count >= 2);
  CHECK(to_sexp(*simplify(sym_not(p))) == "(ge (var a u16) (const u16 9))");
  // a division that may trap is not folded away
  const auto trap = sym_binary(Op::Mul, sym_binary(Op::Div, sym_const(kU16, 1), a), sym_const(kU16, 0));
  CHECK_FALSE(is_const(*simplify(trap)));
  CHECK(to_sexp(*simplify(sym_binary(Op::Div, sym_const(kU8, 1), sym_const(kU8, 0)))) ==
        "(div (const u8 1) (const u8 0))");
}

TEST_CASE("simplify preserves semantics on random expressions") {
  for (IntType t : {kU8, kI8, kU16, kI32}) {
    ExprGen g(100 + t.width + t.is_signed, t, 2);
    for (int i = 0; i < 1000; ++i) {
      const auto e = i % 2 ? g.pred(3) : g.term(4);
      const auto s = simplify(e);
      CHECK(s->type == e->type);
      for (int k = 0; k < 4; ++k) {
        const std::vector<std::uint32_t> env = {g.constant(), g.constant()};
        const auto want = eval(*e, env);
        const auto got = eval(*s, env);
        if (want != got) {
          FAIL(to_sexp(*e) << " => " << to_sexp(*s) << " at " << env[0] << "," << env[1]);
        }
      }
    }
  }
}

TEST_CASE("build_simplified matches simplify at the root") {
  ExprGen g(7, kU16, 2);
  for (int i = 0; i < 300; ++i) {
    const auto x = simplify(g.term(2));
    const auto y = simplify(g.term(2));
    const auto built = build_simplified(Op::Add, x, y);
    for (int k = 0; k < 4; ++k) {
      const std::vector<std::uint32_t> env = {g.constant(), g.constant()};
      CHECK(eval(*built, env) == eval(*sym_binary(Op::Add, x, y), env));
    }
  }
}

TEST_CASE("solver examples") {
  const auto n = sym_var(0, "n", kU8);
  const std::vector<SymRef> div6 = {
      sym_binary(Op::Eq, sym_binary(Op::Rem, n, num(kU8, 2)), num(kU8, 0)),
      sym_binary(Op::Eq, sym_binary(Op::Rem, n, num(kU8, 3)), num(kU8, 0))};
  const auto r = solve(div6);
  REQUIRE(r.status == SolverStatus::Sat);
  CHECK(*r.value(0) % 6 == 0);
  CHECK(holds(div6, model_env(r, 1)));

  CHECK(solve({sym_binary(Op::Lt, n, num(kU8, 5)), sym_binary(Op::Gt, n, num(kU8, 10))}).status ==
        SolverStatus::Unsat);

  const auto a = sym_var(0, "a", kI16);
  const auto b = sym_var(1, "b", kI16);
  CHECK(solve({sym_binary(Op::Lt, a, b), sym_binary(Op::Ge, a, b)}).status == SolverStatus::Unsat);

  const auto big = sym_var(0, "x", kU32);
  const auto r32 = solve({sym_binary(Op::Eq, sym_binary(Op::Add, big, num(kU32, 7)), num(kU32, 3))});
  REQUIRE(r32.status == SolverStatus::Sat);
  CHECK(*r32.value(0) == 0xFFFFFFFCu);

  const auto m = sym_var(0, "m", kU16);
  const auto residue = solve({sym_binary(Op::Eq, sym_binary(Op::Rem, m, num(kU16, 1000)), num(kU16, 777)),
                              sym_binary(Op::Gt, m, num(kU16, 60000))});
  REQUIRE(residue.status == SolverStatus::Sat);
  CHECK(*residue.value(0) == 60777);
}

TEST_CASE("hints are preferred when they satisfy") {
  const auto n = sym_var(0, "n", kU16);
  const std::vector<SymRef> cs = {sym_binary(Op::Gt, n, num(kU16, 100))};
  const std::vector<std::uint32_t> hint = {4242};
  SolveOptions opt;
  opt.hint = &hint;
  CHECK(*solve(cs, opt).value(0) == 4242);
}

TEST_CASE("models assign every variable and verify") {
  ExprGen g(55, kI8, 3);
  int sat = 0;
  for (int i = 0; i < 300; ++i) {
    std::vector<SymRef> cs = {g.pred(2), g.pred(1)};
    const auto r = solve(cs);
    if (r.status != SolverStatus::Sat) continue;
    ++sat;
    std::vector<VarInfo> vars;
    for (const auto& c : cs) collect_vars(*c, vars);
    std::set<std::uint32_t> need, have;
    for (const auto& v : vars) need.insert(v.index);
    for (const auto& m : r.model) have.insert(m.var.index);
    CHECK(need == have);
    CHECK(holds(cs, model_env(r, 3)));
  }
  CHECK(sat > 50);
}

TEST_CASE("single-variable verdicts match brute force") {
  for (IntType t : {kU8, kU16}) {
    ExprGen g(t.width * 31, t, 1);
    const std::uint32_t domain = 1u << t.width;
    int timeouts = 0;
    for (int i = 0; i < 300; ++i) {
      std::vector<SymRef> cs = {g.pred(2)};
      if (i % 2) cs.push_back(g.pred(1));
      bool any = false;
      for (std::uint32_t v = 0; v < domain && !any; ++v) any = holds(cs, {v});
      const auto r = solve(cs);
      if (r.status == SolverStatus::Timeout) {
        ++timeouts;
        continue;
      }
      REQUIRE_MESSAGE((r.status == SolverStatus::Sat) == any, to_sexp(*cs[0]));
      if (any) CHECK(holds(cs, model_env(r, 1)));
    }
    CHECK(timeouts <= 3);
  }
}

TEST_CASE("two-variable verdicts match brute force over u8 x u8") {
  ExprGen g(77, kU8, 2);
  for (int i = 0; i < 60; ++i) {
    const std::vector<SymRef> cs = {g.pred(2), g.pred(1)};
    bool any = false;
    for (std::uint32_t v = 0; v < 65536 && !any; ++v) any = holds(cs, {v & 0xFF, v >> 8});
    const auto r = solve(cs);
    if (r.status == SolverStatus::Timeout) continue;
    REQUIRE((r.status == SolverStatus::Sat) == any);
  }
}

TEST_CASE("budget exhaustion reports a timeout") {
  const auto x = sym_var(0, "x", kU32);
  const auto y = sym_var(1, "y", kU32);
  const auto hard = sym_binary(Op::Eq, sym_binary(Op::BitXor, sym_binary(Op::Mul, x, y),
                                                  sym_binary(Op::Shr, x, num(kU32, 3))),
                               num(kU32, 0x12345677));
  SolveOptions opt;
  opt.budget = 50;
  const auto r = solve({hard}, opt);
  CHECK(r.status == SolverStatus::Timeout);
  CHECK(r.model.empty());
  CHECK(r.stats.nodes_explored >= 50);
}

TEST_CASE("malformed expressions are unsupported") {
  auto bad = std::make_shared<SymNode>();
  bad->kind = SymNode::Kind::Binary;
  bad->op = Op::Add;
  bad->type = kU8;
  bad->operand_type = kU8;
  bad->a = sym_var(0, "a", kU8);
  bad->b = sym_var(1, "b", kU16);
  CHECK_THROWS_AS(validate(*bad), UnsupportedExpr);
  CHECK_THROWS_AS(solve({sym_binary(Op::Eq, SymRef(bad), sym_const(kU8, 1))}), UnsupportedExpr);
  auto no_child = std::make_shared<SymNode>();
  no_child->kind = SymNode::Kind::Unary;
  no_child->op = Op::Neg;
  no_child->type = kU8;
  CHECK_THROWS_AS(validate(*no_child), UnsupportedExpr);
}

TEST_CASE("trapping conjuncts count as false") {
  const auto n = sym_var(0, "n", kU8);
  const auto r = solve({sym_binary(Op::Eq, sym_binary(Op::Div, num(kU8, 10), n), num(kU8, 10))});
  REQUIRE(r.status == SolverStatus::Sat);
  CHECK(*r.value(0) == 1);
  CHECK(solve({sym_binary(Op::Eq, sym_binary(Op::Rem, num(kU8, 10), n), num(kU8, 10))}).status ==
        SolverStatus::Sat);
  CHECK(solve({sym_binary(Op::Eq, sym_binary(Op::Div, n, sym_binary(Op::Sub, n, n)), num(kU8, 0))})
            .status == SolverStatus::Unsat);
}
