#include "greycone/orchestrator.hpp"

#include <stdexcept>

namespace greycone {

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Greycone: return "greycone";
    case Mode::FuzzOnly: return "fuzz";
    case Mode::ConcolicOnly: return "concolic";
  }
  return "greycone";
}

std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "greycone") return Mode::Greycone;
  if (s == "fuzz" || s == "fuzz-only") return Mode::FuzzOnly;
  if (s == "concolic" || s == "concolic-only") return Mode::ConcolicOnly;
  return std::nullopt;
}

void CampaignConfig::validate() const {
  auto bad = [](const std::string& what) { throw std::invalid_argument(what); };
  if (!(target_pct > 0.0 && target_pct <= 100.0)) bad("target must be in (0, 100]");
  if (budget_execs && *budget_execs == 0) bad("execution budget must be positive");
  if (!budget_execs && !(time_cutoff > 0.0)) bad("time cutoff must be positive");
  if (fuzz_stall_execs == 0 && !fuzz_stall_secs) bad("fuzz stall must be positive");
  if (fuzz_stall_secs && !(*fuzz_stall_secs > 0.0)) bad("fuzz stall must be positive");
  if (conc_stall_calls == 0 && !conc_stall_secs) bad("concolic stall must be positive");
  if (conc_stall_secs && !(*conc_stall_secs > 0.0)) bad("concolic stall must be positive");
  if (step_limit == 0) bad("step limit must be positive");
  if (solver_budget == 0) bad("solver budget must be positive");
}

namespace {

class Campaign {
 public:
  Campaign(const InstrumentedProgram& ip, const CampaignConfig& cfg)
      : ip_(ip), cfg_(cfg), fuzzer_(cfg.rng_seed) {
    if (cfg.budget_execs) {
      progress_.set_exec_limit(*cfg.budget_execs);
    } else {
      progress_.set_time_limit(cfg.time_cutoff);
    }
    progress_.set_target(cfg.target_pct);
    st_.map = CoverageMap(ip.edges.size());
    progress_.observe(coverage_pct(st_.map, ip));
  }

  void seed(const std::vector<TestCase>& initial) {
    for (const auto& t : initial) {
      TestCase c;
      c.bytes = normalize_input(ip_.program, t.bytes);
      c.origin = Origin::Initial;
      st_.queue.push(std::move(c));
    }
    if (st_.queue.size() == 0) {
      TestCase zero;
      zero.bytes.assign(ip_.program.input_bytes(), 0);
      st_.queue.push(std::move(zero));
    }
  }

  // Returns true when the campaign must stop.
  bool fuzz(bool stall) {
    FuzzConfig fc;
    fc.step_limit = cfg_.step_limit;
    fc.stall_execs = stall ? cfg_.fuzz_stall_execs : 0;
    if (stall) fc.stall_seconds = cfg_.fuzz_stall_secs;
    PhaseReport r = fuzzer_.phase(ip_, st_.queue, st_.map, progress_, fc);
    r.index = ++fuzz_phases_;
    st_.phase_log.push_back(r);
    return r.stop == StopReason::Target || r.stop == StopReason::Cutoff ||
           r.stop == StopReason::Budget;
  }

  bool concolic(bool stall) {
    ConcolicConfig cc;
    cc.step_limit = cfg_.step_limit;
    cc.fork_limit = cfg_.fork_limit;
    cc.solver_budget = cfg_.solver_budget;
    cc.stall_calls = stall ? cfg_.conc_stall_calls : 0;
    if (stall) cc.stall_seconds = cfg_.conc_stall_secs;
    if (cfg_.record_predicates) cc.predicate_log = &st_.predicates;
    const std::vector<TestCase> seeds = st_.queue.entries;
    std::vector<ConcolicTest> produced;
    PhaseReport r = concolic_phase(ip_, seeds, st_.concolic, st_.map, progress_, cc, produced);
    r.index = ++conc_phases_;
    r.tests_produced = 0;
    for (auto& t : produced) {
      if (st_.queue.push(std::move(t.test), &t.result, &ip_)) ++r.tests_produced;
    }
    st_.phase_log.push_back(r);
    return r.stop == StopReason::Target || r.stop == StopReason::Cutoff;
  }

  CampaignState finish() {
    st_.series = progress_.series();
    st_.executions = progress_.executions();
    st_.seconds = progress_.elapsed();
    st_.final_pct = coverage_pct(st_.map, ip_);
    st_.target_reached = st_.final_pct >= cfg_.target_pct;
    for (const auto& p : st_.series) {
      if (p.pct >= st_.final_pct) {
        st_.execs_to_final = p.executions;
        st_.secs_to_final = p.seconds;
        break;
      }
    }
    for (const auto& p : st_.series) {
      if (p.pct >= cfg_.target_pct) {
        st_.execs_to_target = p.executions;
        break;
      }
    }
    for (const auto& t : st_.queue.entries) {
      if (run_concrete(ip_, t.bytes, cfg_.step_limit).outcome == Outcome::Failed) ++st_.crashes;
    }
    return std::move(st_);
  }

  bool out_of_budget() const { return progress_.cutoff() || progress_.target_reached(); }

 private:
  const InstrumentedProgram& ip_;
  const CampaignConfig& cfg_;
  Fuzzer fuzzer_;
  Progress progress_;
  CampaignState st_;
  int fuzz_phases_ = 0;
  int conc_phases_ = 0;
};

}  // namespace

CampaignState run_campaign(const InstrumentedProgram& ip, const std::vector<TestCase>& initial,
                           const CampaignConfig& cfg) {
  cfg.validate();
  Campaign c(ip, cfg);
  c.seed(initial);
  switch (cfg.mode) {
    case Mode::FuzzOnly:
      c.fuzz(false);
      break;
    case Mode::ConcolicOnly:
      c.concolic(false);
      break;
    case Mode::Greycone:
      for (;;) {
        if (c.fuzz(true)) break;
        if (c.concolic(true)) break;
        if (c.out_of_budget()) break;
      }
      break;
  }
  return c.finish();
}

}  // namespace greycone
