#include <doctest.h>

#include <random>

#include "support.hpp"

using namespace gtest;

namespace {

// Tree-walking reference interpreter over the AST, independent of the
// CFG lowering and bytecode.
struct AstRun {
  std::vector<std::uint32_t> vars;
  bool failed = false;
  bool returned = false;
  std::uint64_t iterations = 0;

  std::optional<std::uint32_t> eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Const: return e.value;
      case Expr::Kind::Var: return vars[e.var];
      case Expr::Kind::Unary: {
        auto a = eval(*e.lhs);
        if (!a) return std::nullopt;
        return apply_unary(e.op, e.lhs->type, *a);
      }
      case Expr::Kind::Binary: {
        auto a = eval(*e.lhs);
        auto b = eval(*e.rhs);
        if (!a || !b) return std::nullopt;
        return apply_binary(e.op, e.lhs->type, *a, *b);
      }
    }
    return std::nullopt;
  }

  void exec(const StmtList& body) {
    for (const auto& s : body) {
      if (failed || returned) return;
      switch (s->kind) {
        case Stmt::Kind::Assign: {
          auto v = eval(*s->expr);
          if (!v) { failed = true; return; }
          vars[s->var] = *v;
          break;
        }
        case Stmt::Kind::If: {
          auto c = eval(*s->expr);
          if (!c) { failed = true; return; }
          exec(*c ? s->body : s->orelse);
          break;
        }
        case Stmt::Kind::While:
          for (;;) {
            auto c = eval(*s->expr);
            if (!c) { failed = true; return; }
            if (!*c || ++iterations > 100000) break;
            exec(s->body);
            if (failed || returned) return;
          }
          break;
        case Stmt::Kind::Return: returned = true; return;
        case Stmt::Kind::Fail: failed = true; return;
      }
    }
  }
};

}  // namespace

TEST_CASE("divisibility program takes the expected arm") {
  const auto ip = program(
      "input u8 n; u8 r;\n"
      "if (n % 2 == 0 && n % 3 == 0) { r = 1; } else if (n % 2 == 0) { r = 2; }\n"
      "else if (n % 3 == 0) { r = 3; } else { r = 4; }\n");
  const auto sites = branch_sites(ip);
  REQUIRE(sites.size() == 3);
  const auto six = run_concrete(ip, std::vector<std::uint8_t>{6});
  CHECK(six.edge_hits[sites[0].true_edge] == 1);
  CHECK(six.values[1] == 1);
  const auto one = run_concrete(ip, std::vector<std::uint8_t>{1});
  CHECK(one.edge_hits[sites[0].false_edge] == 1);
  CHECK(one.edge_hits[sites[1].false_edge] == 1);
  CHECK(one.edge_hits[sites[2].false_edge] == 1);
  CHECK(one.values[1] == 4);
}

TEST_CASE("loop edge counts") {
  const auto ip = program("input u8 n; while (n > 0) { n = n - 1; }");
  const auto site = branch_sites(ip).at(0);
  const auto r = run_concrete(ip, std::vector<std::uint8_t>{5});
  CHECK(r.edge_hits[site.true_edge] == 5);
  CHECK(r.edge_hits[site.false_edge] == 1);
  EdgeId back = kNoId;
  for (EdgeId e = 0; e < ip.edges.size(); ++e) {
    if (!ip.edges[e].is_branch && ip.edges[e].to == site.block && ip.edges[e].from != 0) back = e;
  }
  REQUIRE(back != kNoId);
  CHECK(r.edge_hits[back] == 5);
  CHECK(r.outcome == Outcome::Returned);
}

TEST_CASE("step limit, traps and the fail sink") {
  const auto spin = program("input u8 n; while (n == n) { n = n + 1; }");
  const auto r = run_concrete(spin, std::vector<std::uint8_t>{0}, 1000);
  CHECK(r.outcome == Outcome::StepLimit);
  CHECK(r.steps == 1000);
  const auto div = program("input u8 n; u8 x; x = 10 / n;");
  CHECK(run_concrete(div, std::vector<std::uint8_t>{0}).outcome == Outcome::Failed);
  CHECK(run_concrete(div, std::vector<std::uint8_t>{3}).outcome == Outcome::Returned);
  const auto sink = program("input u8 n; if (n == 7) { fail; }");
  CHECK(run_concrete(sink, std::vector<std::uint8_t>{7}).outcome == Outcome::Failed);
  CHECK(run_concrete(sink, std::vector<std::uint8_t>{8}).outcome == Outcome::Returned);
}

TEST_CASE("input serialization is little-endian, padded and truncated") {
  const auto ip = program("input u8 a; input u16 b; input i32 c; u8 t; t = a;");
  const auto& p = ip.program;
  auto v = decode_inputs(p, std::vector<std::uint8_t>{0x01, 0x34, 0x12, 0xFF, 0xFF, 0xFF, 0xFF});
  CHECK(v[0] == 0x01u);
  CHECK(v[1] == 0x1234u);
  CHECK(v[2] == 0xFFFFFFFFu);
  CHECK(v[3] == 0u);
  CHECK(normalize_input(p, std::vector<std::uint8_t>{1, 2}) ==
        std::vector<std::uint8_t>{1, 2, 0, 0, 0, 0, 0});
  CHECK(normalize_input(p, std::vector<std::uint8_t>(9, 5)).size() == 7);
  std::vector<std::uint8_t> bytes(7, 0);
  encode_input(p, 1, 0xBEEF, bytes);
  CHECK(bytes == std::vector<std::uint8_t>{0, 0xEF, 0xBE, 0, 0, 0, 0});
  // short inputs behave like zero padding
  const auto mv = corpus("motiv");
  CHECK(run_concrete(mv, std::vector<std::uint8_t>{6}).edge_hits ==
        run_concrete(mv, std::vector<std::uint8_t>{6, 0, 0}).edge_hits);
}

TEST_CASE("concrete runs are deterministic") {
  std::mt19937_64 rng(3);
  for (const auto& name : corpus_names()) {
    const auto ip = corpus(name);
    for (int i = 0; i < 50; ++i) {
      const auto b = bytes_of(rng(), ip.program.input_bytes());
      const auto x = run_concrete(ip, b);
      const auto y = run_concrete(ip, b);
      CHECK(x.edge_hits == y.edge_hits);
      CHECK(x.values == y.values);
      CHECK(x.steps == y.steps);
      CHECK(x.outcome == y.outcome);
    }
  }
}

TEST_CASE("bytecode interpreter agrees with an AST walk on the corpus") {
  std::mt19937_64 rng(5);
  for (const auto& name : corpus_names()) {
    const auto ip = corpus(name);
    for (int i = 0; i < 400; ++i) {
      const auto b = bytes_of(rng(), ip.program.input_bytes());
      const auto r = run_concrete(ip, b);
      AstRun ref;
      ref.vars = decode_inputs(ip.program, b);
      ref.exec(ip.program.body);
      CHECK_MESSAGE(r.values == ref.vars, name);
      CHECK((r.outcome == Outcome::Failed) == ref.failed);
    }
  }
}

TEST_CASE("edge hits are conserved against step counts") {
  // Every executed terminator except the final return/fail traverses one
  // edge; every statement costs one step.
  std::mt19937_64 rng(9);
  for (const auto& name : corpus_names()) {
    const auto ip = corpus(name);
    for (int i = 0; i < 200; ++i) {
      const auto r = run_concrete(ip, bytes_of(rng(), ip.program.input_bytes()));
      REQUIRE(r.outcome != Outcome::StepLimit);
      // Count statements by walking the edge sequence: each block entry
      // runs all its statements once.
      std::uint64_t statements = ip.program.blocks[ip.program.entry].statements.size();
      for (EdgeId e = 0; e < ip.edges.size(); ++e) {
        statements += r.edge_hits[e] * ip.program.blocks[ip.edges[e].to].statements.size();
      }
      const std::uint64_t terminators = r.total_hits() + 1;
      CHECK(r.steps == statements + terminators);
    }
  }
}

TEST_CASE("depth counts distinct blocks visited") {
  const auto ip = program("input u8 n; while (n > 0) { n = n - 1; }");
  CHECK(run_concrete(ip, std::vector<std::uint8_t>{0}).depth == 3);
  CHECK(run_concrete(ip, std::vector<std::uint8_t>{9}).depth == 4);
}
