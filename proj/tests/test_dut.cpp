#include <doctest.h>

#include <functional>

#include "support.hpp"

using namespace gtest;

namespace {

// Counts if/while statements straight from the AST.
std::size_t count_conditionals(const StmtList& body) {
  std::size_t n = 0;
  for (const auto& s : body) {
    if (s->kind == Stmt::Kind::If || s->kind == Stmt::Kind::While) ++n;
    n += count_conditionals(s->body) + count_conditionals(s->orelse);
  }
  return n;
}

std::size_t count_cond_terminators(const Program& p) {
  std::size_t n = 0;
  for (const auto& b : p.blocks) n += b.term.kind == Terminator::Kind::CondBranch;
  return n;
}

}  // namespace

TEST_CASE("smallest two-way branch") {
  const auto ip = program("input u8 n; if (n % 2 == 0) {return;} else {return;}");
  CHECK(ip.program.blocks.size() == 3);
  CHECK(ip.branch_edge_count == 2);
  CHECK(branch_sites(ip).size() == 1);
}

TEST_CASE("if/else joining at an exit block has four edges") {
  const auto ip = program("input u8 n; u8 x; if (n > 3) { x = 1; } else { x = 2; }");
  CHECK(ip.edges.size() == 4);
  CHECK(ip.branch_edge_count == 2);
  std::set<std::pair<BlockId, BlockId>> pairs;
  for (const auto& e : ip.edges) pairs.insert({e.from, e.to});
  CHECK(pairs.size() == 4);
  const auto sites = branch_sites(ip);
  REQUIRE(sites.size() == 1);
  CHECK(sites[0].block == ip.program.entry);
  CHECK(sites[0].true_edge != sites[0].false_edge);
}

TEST_CASE("straight-line programs have block count minus one edges and no sites") {
  const auto ip = program("input u8 n; u8 x; x = n + 1; x = x * 2;");
  CHECK(ip.edges.size() == ip.program.blocks.size() - 1);
  CHECK(branch_sites(ip).empty());
  const auto sl = corpus("straightline");
  CHECK(sl.edges.size() == sl.program.blocks.size() - 1);
  CHECK(branch_sites(sl).empty());
}

TEST_CASE("motivating example CFG") {
  const auto ip = corpus("motiv");
  const auto sites = branch_sites(ip);
  // Loop header plus five checks: the 4-way divisibility chain (3 sites)
  // and the two nested guards under the first arm.
  CHECK(sites.size() == 6);
  CHECK(ip.branch_edge_count == 12);
  std::set<EdgeId> ids;
  for (const auto& s : sites) {
    ids.insert(s.true_edge);
    ids.insert(s.false_edge);
  }
  CHECK(ids.size() == 12);
  for (std::size_t i = 1; i < sites.size(); ++i) CHECK(sites[i - 1].block < sites[i].block);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse("input u8 n; if (n + 1) {}"), TypeError);
  CHECK_THROWS_AS(parse("input u8 a; input u16 b; if (a == b) {}"), TypeError);
  CHECK_THROWS_AS(parse("input u8 n; m = 1;"), TypeError);
  CHECK_THROWS_AS(parse("input u8 n; input u8 n;"), TypeError);
  CHECK_THROWS_AS(parse("input u8 n; u8 x; x = 300;"), TypeError);
  try {
    parse("input u8 n;\nif (n > ) {}");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.loc.line == 2);
    CHECK(e.loc.column == 9);
  }
  CHECK_THROWS_AS(parse("input u8 n; while (n > 0) { n = n - 1; "), SyntaxError);
  CHECK_THROWS_AS(parse("input u64 n;"), SyntaxError);
}

TEST_CASE("comments, hex literals and else-if chains") {
  const auto ip = program(
      "// header\ninput u16 a symbolic; // trailing\nu8 r;\n"
      "if (a == 0xBEEF) { r = 1; } else if (a > 10) { r = 2; } else { fail; }\n");
  CHECK(ip.program.inputs.size() == 1);
  CHECK(ip.program.inputs[0].symbolic);
  CHECK(branch_sites(ip).size() == 2);
}

TEST_CASE("corpus files round-trip through the pretty printer") {
  for (const auto& name : corpus_names()) {
    const Program p = parse_file(corpus_path(name));
    const Program q = parse(pretty_print(p), p.name);
    CHECK_MESSAGE(dump_cfg(p) == dump_cfg(q), name);
    CHECK(pretty_print(q) == pretty_print(p));
  }
}

TEST_CASE("parsing and instrumenting are deterministic") {
  for (const auto& name : corpus_names()) {
    const auto a = corpus(name);
    const auto b = corpus(name);
    CHECK(a.edge_table_hash == b.edge_table_hash);
    CHECK(branch_sites(a) == branch_sites(b));
    CHECK(dump_cfg(a.program) == dump_cfg(b.program));
    CHECK(instrument(a.program).edge_table_hash == a.edge_table_hash);
  }
}

TEST_CASE("branch site count equals the conditionals in the source") {
  for (const auto& name : corpus_names()) {
    const auto ip = corpus(name);
    CHECK_MESSAGE(branch_sites(ip).size() == count_conditionals(ip.program.body), name);
    CHECK(branch_sites(ip).size() == count_cond_terminators(ip.program));
    CHECK(ip.branch_edge_count == 2 * branch_sites(ip).size());
  }
}

TEST_CASE("edge table is consistent with block terminators") {
  for (const auto& name : corpus_names()) {
    const auto ip = corpus(name);
    std::size_t expected = 0;
    for (const auto& b : ip.program.blocks) {
      const auto& be = ip.block_edges[b.id];
      switch (b.term.kind) {
        case Terminator::Kind::Goto:
          ++expected;
          CHECK(ip.edges[be.taken].to == b.term.target);
          CHECK_FALSE(ip.edges[be.taken].is_branch);
          break;
        case Terminator::Kind::CondBranch:
          expected += 2;
          CHECK(ip.edges[be.taken].to == b.term.target);
          CHECK(ip.edges[be.not_taken].to == b.term.false_target);
          CHECK(ip.edges[be.taken].is_branch);
          break;
        default:
          break;
      }
    }
    CHECK(ip.edges.size() == expected);
  }
}

TEST_CASE("inputs are laid out in declaration order") {
  const auto ip = program("input u8 a; input u16 b symbolic; input i32 c; u8 t; t = a;");
  const auto& in = ip.program.inputs;
  REQUIRE(in.size() == 3);
  CHECK(in[1].byte_offset == 1);
  CHECK(in[2].byte_offset == 3);
  CHECK(ip.program.input_bytes() == 7);
  CHECK(ip.program.symbolic_input_count() == 1);
}
