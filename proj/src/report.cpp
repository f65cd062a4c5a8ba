#include "greycone/report.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace greycone {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string emit_lcov(const CoverageMap& m, const InstrumentedProgram& ip,
                      const std::string& source_path) {
  std::ostringstream os;
  os << "TN:" << ip.program.name << "\n";
  os << "SF:" << source_path << "\n";
  std::size_t found = 0, hit = 0;
  auto brda = [&](const BranchSite& s, int outcome, EdgeId e) {
    ++found;
    os << "BRDA:" << s.line << "," << s.block << "," << outcome << ",";
    const std::uint64_t n = e < m.edge_count() ? m.total_hits(e) : 0;
    if (n) {
      ++hit;
      os << n;
    } else {
      os << "-";
    }
    os << "\n";
  };
  for (const auto& s : branch_sites(ip)) {
    brda(s, 0, s.true_edge);
    brda(s, 1, s.false_edge);
  }
  os << "BRF:" << found << "\n";
  os << "BRH:" << hit << "\n";
  os << "end_of_record\n";
  return os.str();
}

LcovTotals parse_lcov_totals(std::string_view text) {
  LcovTotals t;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("BRF:", 0) == 0) t.found += std::stoull(line.substr(4));
    else if (line.rfind("BRH:", 0) == 0) t.hit += std::stoull(line.substr(4));
    else if (line.rfind("BRDA:", 0) == 0) ++t.brda;
  }
  return t;
}

CoverageMap replay_tests(const InstrumentedProgram& ip, const std::vector<TestCase>& tests,
                         std::uint64_t step_limit) {
  CoverageMap m(ip.edges.size());
  for (const auto& t : tests) m.merge(run_concrete(ip, t.bytes, step_limit));
  return m;
}

RunRecord make_record(const std::string& benchmark, const InstrumentedProgram& ip,
                      const CampaignConfig& cfg, const CampaignState& st) {
  RunRecord r;
  r.benchmark = benchmark;
  r.mode = cfg.mode;
  r.seed = cfg.rng_seed;
  r.tests = st.queue.size();
  r.final_pct = st.final_pct;
  r.target_reached = st.target_reached;
  r.executions = st.executions;
  r.execs_to_final = st.execs_to_final;
  r.secs_to_final = st.secs_to_final;
  r.execs_to_target = st.execs_to_target;
  r.crashes = st.crashes;
  r.series = st.series;
  r.phases = st.phase_log;
  r.branch_edges = ip.branch_edge_count;
  r.covered_branch_edges = st.map.covered_branch_edges(ip);
  r.with_seconds = !cfg.deterministic();
  return r;
}

std::string phase_label(const PhaseReport& p) {
  return std::string(phase_kind_name(p.kind)) + "_" + std::to_string(p.index);
}

namespace {

ordered_json record_to_json(const RunRecord& r) {
  ordered_json j;
  j["benchmark"] = r.benchmark;
  j["mode"] = std::string(mode_name(r.mode));
  j["seed"] = r.seed;
  j["tests"] = r.tests;
  j["branch_edges"] = r.branch_edges;
  j["covered_branch_edges"] = r.covered_branch_edges;
  j["final_coverage_pct"] = r.final_pct;
  j["target_reached"] = r.target_reached;
  j["executions"] = r.executions;
  j["execs_to_final"] = r.execs_to_final;
  j["execs_to_target"] = r.execs_to_target ? ordered_json(*r.execs_to_target) : ordered_json();
  if (r.with_seconds) j["secs_to_final"] = r.secs_to_final;
  j["crashes"] = r.crashes;
  ordered_json phases = ordered_json::array();
  for (const auto& p : r.phases) {
    ordered_json e;
    e["phase"] = phase_label(p);
    e["executions"] = p.executions;
    e["tests_produced"] = p.tests_produced;
    e["coverage_before"] = p.coverage_before;
    e["coverage_after"] = p.coverage_after;
    e["stop"] = std::string(stop_reason_name(p.stop));
    if (r.with_seconds) e["seconds"] = p.seconds;
    if (p.kind == PhaseKind::Concolic) {
      e["solver_calls"] = p.solver_calls;
      e["sat"] = p.sat;
      e["unsat"] = p.unsat;
      e["timeout"] = p.timeout;
      e["replays"] = p.replays;
      e["replay_divergences"] = p.replay_divergences;
      e["tree_nodes"] = p.tree_nodes;
      e["frontier_size"] = p.frontier_size;
    }
    phases.push_back(std::move(e));
  }
  j["phases"] = std::move(phases);
  ordered_json series = ordered_json::array();
  for (const auto& s : r.series) {
    ordered_json e;
    e["executions"] = s.executions;
    if (r.with_seconds) e["seconds"] = s.seconds;
    e["pct"] = s.pct;
    series.push_back(std::move(e));
  }
  j["series"] = std::move(series);
  return j;
}

std::string fmt_pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string fmt_secs(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ReportError("cannot write " + p.string());
  os << text;
  if (!os) throw ReportError("cannot write " + p.string());
}

std::string phase_shape(const RunRecord& r) {
  std::string s;
  for (const auto& p : r.phases) s += p.kind == PhaseKind::Fuzz ? 'F' : 'C';
  return s.empty() ? "-" : s;
}

}  // namespace

std::string stats_json(const RunRecord& r) { return record_to_json(r).dump(2) + "\n"; }

std::string tree_stats_json(const CampaignState& st) {
  ordered_json j;
  const ExecutionTree& tree = st.concolic.tree;
  j["nodes"] = tree.node_count();
  j["traces"] = tree.trace_count();
  j["covered_outcomes"] = tree.covered_outcomes();
  j["frontier_size"] = tree.frontier_size();
  std::uint64_t calls = 0, sat = 0, unsat = 0, timeout = 0, div = 0;
  for (const auto& p : st.phase_log) {
    calls += p.solver_calls;
    sat += p.sat;
    unsat += p.unsat;
    timeout += p.timeout;
    div += p.replay_divergences;
  }
  j["solver_calls"] = calls;
  j["sat"] = sat;
  j["unsat"] = unsat;
  j["timeout"] = timeout;
  j["replay_divergences"] = div;
  return j.dump(2) + "\n";
}

std::string series_csv(const std::vector<SeriesPoint>& s, bool with_seconds) {
  std::ostringstream os;
  os << (with_seconds ? "executions,seconds,pct\n" : "executions,pct\n");
  for (const auto& p : s) {
    os << p.executions << ",";
    if (with_seconds) os << fmt_secs(p.seconds) << ",";
    os << fmt_pct(p.pct) << "\n";
  }
  return os.str();
}

std::string campaign_toml(const std::string& dut_path, const CampaignConfig& cfg) {
  std::ostringstream os;
  auto str = [](const std::string& s) { return ordered_json(s).dump(); };
  os << "dut = " << str(dut_path) << "\n";
  os << "mode = " << str(std::string(mode_name(cfg.mode))) << "\n";
  os << "seed = " << cfg.rng_seed << "\n";
  os << "target_pct = " << fmt_pct(cfg.target_pct) << "\n";
  if (cfg.budget_execs) os << "budget_execs = " << *cfg.budget_execs << "\n";
  else os << "budget_secs = " << cfg.time_cutoff << "\n";
  if (cfg.fuzz_stall_secs) os << "fuzz_stall_secs = " << *cfg.fuzz_stall_secs << "\n";
  else os << "fuzz_stall_execs = " << cfg.fuzz_stall_execs << "\n";
  if (cfg.conc_stall_secs) os << "conc_stall_secs = " << *cfg.conc_stall_secs << "\n";
  else os << "conc_stall_calls = " << cfg.conc_stall_calls << "\n";
  os << "step_limit = " << cfg.step_limit << "\n";
  os << "fork_limit = " << cfg.fork_limit << "\n";
  os << "solver_budget = " << cfg.solver_budget << "\n";
  return os.str();
}

std::vector<SeriesPoint> series_from_stats(std::string_view json_text, bool* with_seconds) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ReportError(std::string("malformed stats.json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("series") || !j["series"].is_array()) {
    throw ReportError("stats.json has no series array");
  }
  std::vector<SeriesPoint> out;
  bool secs = false;
  try {
    for (const auto& e : j["series"]) {
      SeriesPoint p;
      p.executions = e.at("executions").get<std::uint64_t>();
      p.pct = e.at("pct").get<double>();
      if (e.contains("seconds")) {
        secs = true;
        p.seconds = e["seconds"].get<double>();
      }
      out.push_back(p);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ReportError(std::string("malformed series entry: ") + e.what());
  }
  if (with_seconds) *with_seconds = secs;
  return out;
}

std::string queue_file_name(const TestCase& t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "id:%06zu,src:", t.id);
  return buf + std::string(origin_tag(t.origin));
}

void write_campaign_dir(const fs::path& dir, const std::string& dut_path,
                        const InstrumentedProgram& ip, const CampaignConfig& cfg,
                        const CampaignState& st) {
  std::error_code ec;
  fs::create_directories(dir / "queue", ec);
  if (ec) throw ReportError("cannot create " + (dir / "queue").string() + ": " + ec.message());
  for (const auto& entry : fs::directory_iterator(dir / "queue")) fs::remove(entry.path());
  for (const auto& t : st.queue.entries) {
    write_file(dir / "queue" / queue_file_name(t), std::string(t.bytes.begin(), t.bytes.end()));
  }
  const RunRecord rec = make_record(ip.program.name, ip, cfg, st);
  write_file(dir / "campaign.toml", campaign_toml(dut_path, cfg));
  write_file(dir / "stats.json", stats_json(rec));
  write_file(dir / "tree_stats.json", tree_stats_json(st));
  write_file(dir / "series.csv", series_csv(st.series, rec.with_seconds));
  write_file(dir / "coverage.lcov",
             emit_lcov(replay_tests(ip, st.queue.entries, cfg.step_limit), ip, dut_path));
  if (cfg.record_predicates) {
    std::string all;
    for (const auto& p : st.predicates) all += p;
    write_file(dir / "predicates.sexp", all);
  }
}

std::vector<TestCase> read_queue_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  if (ec) throw ReportError("cannot read " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  std::vector<TestCase> out;
  for (const auto& f : files) {
    std::ifstream is(f, std::ios::binary);
    TestCase t;
    t.bytes.assign(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
    t.id = out.size();
    const std::string name = f.filename().string();
    if (name.find("src:fuzz") != std::string::npos) t.origin = Origin::FuzzMutation;
    else if (name.find("src:concolic") != std::string::npos) t.origin = Origin::ConcolicSolver;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<fs::path> corpus_files(const fs::path& dir) {
  std::vector<fs::path> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    if (e.is_regular_file() && e.path().extension() == ".dut") out.push_back(e.path());
  }
  if (ec) throw ReportError("cannot read corpus " + dir.string() + ": " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<RunRecord> run_bench(const std::vector<fs::path>& files, const CampaignConfig& base,
                                 unsigned jobs) {
  static constexpr Mode kModes[] = {Mode::Greycone, Mode::FuzzOnly, Mode::ConcolicOnly};
  std::vector<InstrumentedProgram> programs;
  programs.reserve(files.size());
  for (const auto& f : files) programs.push_back(instrument(parse_file(f.string())));

  const std::size_t n = files.size() * std::size(kModes);
  std::vector<RunRecord> rows(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next++;
      if (i >= n) return;
      try {
        const InstrumentedProgram& ip = programs[i / std::size(kModes)];
        CampaignConfig cfg = base;
        cfg.mode = kModes[i % std::size(kModes)];
        const CampaignState st = run_campaign(ip, {}, cfg);
        rows[i] = make_record(ip.program.name, ip, cfg, st);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return rows;
}

std::string bench_table(const std::vector<RunRecord>& rows) {
  const bool secs = !rows.empty() && rows.front().with_seconds;
  std::vector<std::string> head = {"benchmark", "mode",           "tests",  "branch_cov_pct",
                                   "execs",     "execs_to_final", "phases", "crashes"};
  if (secs) head.insert(head.begin() + 6, "secs_to_final");
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    std::vector<std::string> c = {r.benchmark,
                                  std::string(mode_name(r.mode)),
                                  std::to_string(r.tests),
                                  fmt_pct(r.final_pct),
                                  std::to_string(r.executions),
                                  std::to_string(r.execs_to_final),
                                  phase_shape(r),
                                  std::to_string(r.crashes)};
    if (secs) c.insert(c.begin() + 6, fmt_secs(r.secs_to_final));
    cells.push_back(std::move(c));
  }
  std::vector<std::size_t> width(head.size());
  for (std::size_t k = 0; k < head.size(); ++k) width[k] = head[k].size();
  for (const auto& c : cells) {
    for (std::size_t k = 0; k < c.size(); ++k) width[k] = std::max(width[k], c[k].size());
  }
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& c) {
    for (std::size_t k = 0; k < c.size(); ++k) {
      // Names left aligned, numbers right aligned.
      if (k < 2) os << std::left;
      else os << std::right;
      os << std::setw(static_cast<int>(width[k])) << c[k];
      os << (k + 1 < c.size() ? "  " : "\n");
    }
  };
  line(head);
  std::size_t total = 0;
  for (auto w : width) total += w;
  os << std::string(total + 2 * (width.size() - 1), '-') << "\n";
  for (const auto& c : cells) line(c);
  return os.str();
}

std::string bench_csv(const std::vector<RunRecord>& rows) {
  const bool secs = !rows.empty() && rows.front().with_seconds;
  std::ostringstream os;
  os << "benchmark,mode,seed,tests,branch_cov_pct,executions,execs_to_final,";
  if (secs) os << "secs_to_final,";
  os << "execs_to_target,phases,crashes\n";
  for (const auto& r : rows) {
    os << r.benchmark << "," << mode_name(r.mode) << "," << r.seed << "," << r.tests << ","
       << fmt_pct(r.final_pct) << "," << r.executions << "," << r.execs_to_final << ",";
    if (secs) os << fmt_secs(r.secs_to_final) << ",";
    if (r.execs_to_target) os << *r.execs_to_target;
    os << "," << phase_shape(r) << "," << r.crashes << "\n";
  }
  return os.str();
}

std::string bench_stats_json(const std::vector<RunRecord>& rows) {
  ordered_json runs = ordered_json::array();
  for (const auto& r : rows) runs.push_back(record_to_json(r));
  ordered_json j;
  j["runs"] = std::move(runs);
  return j.dump(2) + "\n";
}

}  // namespace greycone
