#include "greycone/concolic.hpp"

#include <algorithm>
#include <chrono>
#include <tuple>

namespace greycone {

std::size_t PathTrace::symbolic_steps() const {
  return static_cast<std::size_t>(
      std::count_if(steps.begin(), steps.end(), [](const TraceStep& s) { return s.is_symbolic; }));
}

SymRef step_constraint(const TraceStep& s) { return s.taken ? s.cond : sym_not(s.cond); }

// -- symbolic tracing -------------------------------------------------------

namespace {

// Shadows deeper than this are replaced by their concrete value, with the
// equality pinned, so long loops cannot grow unbounded expressions.
constexpr std::uint32_t kMaxShadowDepth = 256;

struct SVal {
  std::uint32_t v = 0;
  SymRef s;
};

class SymbolicRunner {
 public:
  SymbolicRunner(const InstrumentedProgram& ip, PathTrace& tr, std::uint32_t fork_limit)
      : ip_(ip), tr_(tr), fork_limit_(fork_limit) {}

  void run(std::span<const std::uint8_t> bytes, std::uint64_t step_limit) {
    const Program& p = ip_.program;
    ExecResult& r = tr_.result;
    r.edge_hits.assign(ip_.edges.size(), 0);
    r.values = decode_inputs(p, bytes);
    tr_.bytes = normalize_input(p, bytes);
    tr_.input_values.assign(r.values.begin(), r.values.begin() + p.inputs.size());
    shadow_.assign(p.vars.size(), nullptr);
    for (std::uint32_t i = 0; i < p.inputs.size(); ++i) {
      if (p.inputs[i].symbolic) shadow_[i] = sym_var(i, p.inputs[i].name, p.inputs[i].type);
    }
    site_count_.assign(p.blocks.size(), 0);
    std::vector<bool> visited(p.blocks.size(), false);

    BlockId b = p.entry;
    for (;;) {
      if (!visited[b]) {
        visited[b] = true;
        ++r.depth;
      }
      const BasicBlock& blk = p.blocks[b];
      for (const auto& a : blk.statements) {
        if (r.steps >= step_limit) {
          r.outcome = Outcome::StepLimit;
          return;
        }
        ++r.steps;
        SVal v = eval(*a.value);
        if (trapped_) {
          r.outcome = Outcome::Failed;
          return;
        }
        if (v.s && v.s->depth > kMaxShadowDepth) {
          tr_.pinned.push_back(sym_binary(Op::Eq, v.s, sym_const(v.s->type, v.v)));
          v.s = nullptr;
        }
        r.values[a.var] = v.v;
        shadow_[a.var] = v.s;
      }
      if (r.steps >= step_limit) {
        r.outcome = Outcome::StepLimit;
        return;
      }
      ++r.steps;
      const BlockEdges& be = ip_.block_edges[b];
      switch (blk.term.kind) {
        case Terminator::Kind::Return:
          r.outcome = Outcome::Returned;
          return;
        case Terminator::Kind::Fail:
          r.outcome = Outcome::Failed;
          return;
        case Terminator::Kind::Goto:
          ++r.edge_hits[be.taken];
          b = blk.term.target;
          break;
        case Terminator::Kind::CondBranch: {
          const SVal c = eval(*blk.term.cond);
          if (trapped_) {
            r.outcome = Outcome::Failed;
            return;
          }
          const bool taken = c.v != 0;
          TraceStep step;
          step.site = b;
          step.taken = taken;
          step.cond = c.s ? c.s : sym_bool(taken);
          if (c.s) {
            if (++site_count_[b] <= fork_limit_) {
              step.is_symbolic = true;
            } else {
              tr_.pinned.push_back(step_constraint(step));
            }
          }
          step.pinned_before = tr_.pinned.size();
          tr_.steps.push_back(std::move(step));
          if (taken) {
            ++r.edge_hits[be.taken];
            b = blk.term.target;
          } else {
            ++r.edge_hits[be.not_taken];
            b = blk.term.false_target;
          }
          break;
        }
      }
    }
  }

 private:
  SVal eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Const:
        return {e.value, nullptr};
      case Expr::Kind::Var:
        return {tr_.result.values[e.var], shadow_[e.var]};
      case Expr::Kind::Unary: {
        const SVal a = eval(*e.lhs);
        if (trapped_) return {};
        SVal r{apply_unary(e.op, e.operand_type, a.v), nullptr};
        if (a.s) r.s = concrete_if_const(build_simplified(e.op, a.s));
        return r;
      }
      case Expr::Kind::Binary: {
        const SVal a = eval(*e.lhs);
        if (trapped_) return {};
        const SVal b = eval(*e.rhs);
        if (trapped_) return {};
        const IntType t = e.operand_type;
        auto v = apply_binary(e.op, t, a.v, b.v);
        if (!v) {
          trapped_ = true;
          return {};
        }
        if ((e.op == Op::Div || e.op == Op::Rem) && b.s) {
          tr_.pinned.push_back(sym_binary(Op::Ne, b.s, sym_const(t, 0)));
        }
        SVal r{*v, nullptr};
        if (a.s || b.s) {
          r.s = concrete_if_const(build_simplified(e.op, a.s ? a.s : sym_const(t, a.v),
                                                   b.s ? b.s : sym_const(t, b.v)));
        }
        return r;
      }
    }
    return {};
  }

  static SymRef concrete_if_const(SymRef s) { return is_const(*s) ? nullptr : s; }

  const InstrumentedProgram& ip_;
  PathTrace& tr_;
  std::uint32_t fork_limit_;
  std::vector<SymRef> shadow_;
  std::vector<std::uint32_t> site_count_;
  bool trapped_ = false;
};

}  // namespace

PathTrace run_symbolic(const InstrumentedProgram& ip, std::span<const std::uint8_t> bytes,
                       std::uint64_t step_limit, std::uint32_t fork_limit) {
  PathTrace tr;
  SymbolicRunner(ip, tr, fork_limit).run(bytes, step_limit);
  return tr;
}

// -- execution tree ---------------------------------------------------------

ExecutionTree::ExecutionTree() { nodes_.emplace_back(); }

std::uint64_t ExecutionTree::add_trace(PathTrace trace) {
  if (auto it = by_bytes_.find(trace.bytes); it != by_bytes_.end()) return it->second;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const TraceStep& s = trace.steps[i];
    if (!s.is_symbolic) continue;
    auto v = eval(*s.cond, trace.input_values);
    if (!v || (*v != 0) != s.taken) {
      throw ReplayMismatch("trace step " + std::to_string(i) + " at site " +
                           std::to_string(s.site) + " disagrees with its predicate");
    }
  }
  const std::uint64_t id = traces_.size();
  trace.id = id;

  std::size_t cur = 0;
  bool last = false;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const TraceStep& s = trace.steps[i];
    if (!s.is_symbolic) continue;
    const auto key = std::make_pair(last, s.site);
    std::size_t next;
    if (auto it = nodes_[cur].children.find(key); it != nodes_[cur].children.end()) {
      next = it->second;
    } else {
      Node n;
      n.site = s.site;
      n.cond = s.cond;
      n.origin = id;
      n.step = i;
      n.depth = cur == 0 ? 0 : nodes_[cur].depth + 1;
      n.parent = cur;
      next = nodes_.size();
      nodes_.push_back(std::move(n));
      nodes_[cur].children.emplace(key, next);
    }
    nodes_[next].covered[s.taken ? 1 : 0] = true;
    cur = next;
    last = s.taken;
  }
  by_bytes_.emplace(trace.bytes, id);
  traces_.push_back(std::move(trace));
  return id;
}

PathPredicate ExecutionTree::predicate_for(std::size_t id, bool outcome) const {
  const Node& n = nodes_.at(id);
  const PathTrace& tr = traces_.at(n.origin);
  PathPredicate p;
  for (std::size_t i = 0; i < n.step; ++i) {
    if (tr.steps[i].is_symbolic) p.conjuncts.push_back(step_constraint(tr.steps[i]));
  }
  const TraceStep& target = tr.steps[n.step];
  p.conjuncts.push_back(outcome ? target.cond : sym_not(target.cond));
  p.assumptions.assign(tr.pinned.begin(),
                       tr.pinned.begin() + static_cast<std::ptrdiff_t>(target.pinned_before));
  p.target_site = n.site;
  p.desired = outcome;
  p.depth = n.depth;
  p.origin = n.origin;
  p.target_step = n.step;
  p.node = id;
  return p;
}

std::vector<std::pair<std::size_t, bool>> ExecutionTree::open_outcomes() const {
  std::vector<std::pair<std::size_t, bool>> open;
  for (std::size_t id = 1; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    for (int o = 1; o >= 0; --o) {
      if (!n.covered[o] && n.covered[1 - o] && !n.attempted[o]) open.emplace_back(id, o == 1);
    }
  }
  auto key = [&](const std::pair<std::size_t, bool>& e) {
    const Node& n = nodes_[e.first];
    return std::make_tuple(-static_cast<std::int64_t>(n.depth), n.site, e.first);
  };
  std::stable_sort(open.begin(), open.end(),
                   [&](const auto& x, const auto& y) { return key(x) < key(y); });
  return open;
}

std::vector<PathPredicate> ExecutionTree::frontier() const {
  std::vector<PathPredicate> out;
  for (const auto& [id, o] : open_outcomes()) out.push_back(predicate_for(id, o));
  return out;
}

std::optional<PathPredicate> ExecutionTree::next_target() const {
  const auto open = open_outcomes();
  if (open.empty()) return std::nullopt;
  return predicate_for(open.front().first, open.front().second);
}

void ExecutionTree::mark_attempted(const PathPredicate& p) {
  nodes_.at(p.node).attempted[p.desired ? 1 : 0] = true;
}

std::size_t ExecutionTree::covered_outcomes() const {
  std::size_t n = 0;
  for (std::size_t id = 1; id < nodes_.size(); ++id) {
    n += nodes_[id].covered[0] + nodes_[id].covered[1];
  }
  return n;
}

// -- negate and solve -------------------------------------------------------

std::vector<std::uint8_t> materialize(const Program& p, const std::vector<std::uint8_t>& seed,
                                      const SolverResult& model) {
  std::vector<std::uint8_t> bytes = normalize_input(p, seed);
  for (const auto& m : model.model) {
    if (m.var.index < p.inputs.size() && p.inputs[m.var.index].symbolic) {
      encode_input(p, m.var.index, m.value, bytes);
    }
  }
  return bytes;
}

bool replay_matches(const PathTrace& origin, const PathTrace& t, const PathPredicate& p) {
  const std::size_t k = p.target_step;
  if (origin.steps.size() <= k || t.steps.size() <= k) return false;
  for (std::size_t i = 0; i < k; ++i) {
    if (t.steps[i].site != origin.steps[i].site || t.steps[i].taken != origin.steps[i].taken) {
      return false;
    }
  }
  return t.steps[k].site == p.target_site && t.steps[k].taken == p.desired;
}

PhaseReport concolic_phase(const InstrumentedProgram& ip, const std::vector<TestCase>& seeds,
                           ConcolicState& state, CoverageMap& map, Progress& progress,
                           const ConcolicConfig& cfg, std::vector<ConcolicTest>& out) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  ExecutionTree& tree = state.tree;
  PhaseReport rep;
  rep.kind = PhaseKind::Concolic;
  rep.coverage_before = coverage_pct(map, ip);

  auto finish = [&](StopReason why) {
    rep.stop = why;
    rep.coverage_after = coverage_pct(map, ip);
    rep.tree_nodes = tree.node_count();
    rep.frontier_size = tree.frontier_size();
    rep.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return rep;
  };
  auto absorb = [&](const ExecResult& r) {
    const std::size_t fresh = map.merge(r);
    if (fresh) progress.observe(coverage_pct(map, ip));
    return fresh;
  };

  for (const auto& seed : seeds) {
    if (progress.target_reached()) return finish(StopReason::Target);
    if (progress.cutoff()) return finish(StopReason::Cutoff);
    const auto bytes = normalize_input(ip.program, seed.bytes);
    if (tree.has_trace(bytes)) continue;
    PathTrace tr = run_symbolic(ip, bytes, cfg.step_limit, cfg.fork_limit);
    progress.tick();
    ++rep.executions;
    absorb(tr.result);
    tree.add_trace(std::move(tr));
  }

  std::uint64_t calls_since_gain = 0;
  auto last_gain = Clock::now();
  for (;;) {
    if (progress.target_reached()) return finish(StopReason::Target);
    if (progress.cutoff()) return finish(StopReason::Cutoff);
    if (cfg.stall_seconds) {
      if (std::chrono::duration<double>(Clock::now() - last_gain).count() >= *cfg.stall_seconds) {
        return finish(StopReason::Stalled);
      }
    } else if (cfg.stall_calls && calls_since_gain >= cfg.stall_calls) {
      return finish(StopReason::Stalled);
    }
    const auto next = tree.next_target();
    if (!next) return finish(StopReason::Exhausted);
    const PathPredicate& p = *next;
    tree.mark_attempted(p);
    if (cfg.predicate_log) cfg.predicate_log->push_back(dump_predicate(p));

    const PathTrace& origin = tree.trace(p.origin);
    SolveOptions opt;
    opt.budget = cfg.solver_budget;
    opt.hint = &origin.input_values;
    const SolverResult res = solve(p, opt);
    ++rep.solver_calls;
    ++calls_since_gain;
    if (res.status == SolverStatus::Unsat) ++rep.unsat;
    if (res.status == SolverStatus::Timeout) ++rep.timeout;
    if (res.status != SolverStatus::Sat) continue;
    ++rep.sat;

    auto bytes = materialize(ip.program, origin.bytes, res);
    if (const auto seen = tree.find_trace(bytes)) {
      // Already run: its recorded path must still reach the target outcome.
      ++rep.replays;
      if (!replay_matches(tree.trace(p.origin), tree.trace(*seen), p)) ++rep.replay_divergences;
      continue;
    }
    PathTrace tr = run_symbolic(ip, bytes, cfg.step_limit, cfg.fork_limit);
    progress.tick();
    ++rep.executions;
    ++rep.replays;
    const bool ok = replay_matches(origin, tr, p);
    if (!ok) ++rep.replay_divergences;
    if (absorb(tr.result)) {
      calls_since_gain = 0;
      last_gain = Clock::now();
    }
    TestCase t;
    t.bytes = bytes;
    t.origin = Origin::ConcolicSolver;
    t.discovered_at = progress.executions();
    out.push_back({std::move(t), tr.result, ok});
    ++rep.tests_produced;
    tree.add_trace(std::move(tr));
  }
}

}  // namespace greycone
