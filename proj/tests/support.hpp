#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "greycone/coverage.hpp"
#include "greycone/dut.hpp"
#include "greycone/exec.hpp"
#include "greycone/symexpr.hpp"

namespace gtest {

using namespace greycone;

inline InstrumentedProgram program(const std::string& src, const std::string& name = "dut") {
  return instrument(parse(src, name));
}

inline std::string corpus_path(const std::string& name) {
  return std::string(GREYCONE_CORPUS_DIR) + "/" + name + ".dut";
}

inline InstrumentedProgram corpus(const std::string& name) {
  return instrument(parse_file(corpus_path(name)));
}

inline const std::vector<std::string>& corpus_names() {
  static const std::vector<std::string> names = {"fig2",   "loop_eq",      "motiv",
                                                 "nested_magic", "parity", "straightline"};
  return names;
}

inline std::vector<std::uint8_t> bytes_of(std::uint64_t x, std::size_t n) {
  std::vector<std::uint8_t> b(n);
  for (std::size_t k = 0; k < n; ++k) b[k] = static_cast<std::uint8_t>(x >> (8 * k));
  return b;
}

/// Branch edges some input reaches, by enumerating the whole input domain
/// (stops early once every branch edge has been seen).
inline std::set<EdgeId> reachable_branch_edges(const InstrumentedProgram& ip) {
  std::set<EdgeId> all, seen;
  for (EdgeId e = 0; e < ip.edges.size(); ++e) {
    if (ip.edges[e].is_branch) all.insert(e);
  }
  const std::size_t n = ip.program.input_bytes();
  const std::uint64_t domain = n >= 8 ? ~0ull : (1ull << (8 * n));
  for (std::uint64_t x = 0; x < domain && seen.size() < all.size(); ++x) {
    const ExecResult r = run_concrete(ip, bytes_of(x, n));
    for (EdgeId e : all) {
      if (r.edge_hits[e]) seen.insert(e);
    }
  }
  return seen;
}

inline double reachable_pct(const InstrumentedProgram& ip) {
  return round_pct(reachable_branch_edges(ip).size(), ip.branch_edge_count);
}

/// Random expressions over variables 0..vars-1 of type `t`.
class ExprGen {
 public:
  ExprGen(std::uint64_t seed, IntType t, std::uint32_t vars = 1) : rng_(seed), t_(t), vars_(vars) {}

  std::mt19937_64& rng() { return rng_; }

  SymRef term(int depth) {
    const auto pick = rng_() % 10;
    if (depth <= 0 || pick < 3) {
      if (rng_() % 2) return var();
      return sym_const(t_, constant());
    }
    if (pick < 5) {
      static const Op un[] = {Op::Neg, Op::BitNot};
      return sym_unary(un[rng_() % 2], term(depth - 1));
    }
    static const Op bin[] = {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Rem,
                             Op::BitAnd, Op::BitOr, Op::BitXor, Op::Shl, Op::Shr};
    return sym_binary(bin[rng_() % 10], term(depth - 1), term(depth - 1));
  }

  SymRef pred(int depth) {
    const auto pick = rng_() % 10;
    if (depth <= 0 || pick < 6) {
      static const Op cmp[] = {Op::Eq, Op::Ne, Op::Lt, Op::Le, Op::Gt, Op::Ge};
      return sym_binary(cmp[rng_() % 6], term(2), term(1));
    }
    if (pick < 7) return sym_unary(Op::LNot, pred(depth - 1));
    return sym_binary(rng_() % 2 ? Op::LAnd : Op::LOr, pred(depth - 1), pred(depth - 1));
  }

  SymRef var() {
    const auto i = static_cast<std::uint32_t>(rng_() % vars_);
    return sym_var(i, std::string(1, static_cast<char>('a' + i)), t_);
  }

  std::uint32_t constant() {
    static const std::uint32_t small[] = {0, 1, 2, 3, 5, 7, 16, 100};
    if (rng_() % 2) return truncate(small[rng_() % 8], t_);
    return truncate(rng_(), t_);
  }

 private:
  std::mt19937_64 rng_;
  IntType t_;
  std::uint32_t vars_;
};

}  // namespace gtest
