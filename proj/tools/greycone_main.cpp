// greycone: command-line front end.
//
//   greycone run --dut corpus/motiv.dut --mode greycone --budget-execs 500000
//   greycone bench --corpus corpus --seed 7 --budget-execs 200000
//   greycone parse-check corpus/*.dut
//   greycone solve predicate.sexp
//   greycone report greycone-out

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "greycone/orchestrator.hpp"
#include "greycone/report.hpp"
#include "greycone/solver.hpp"
#include "greycone/symexpr.hpp"

namespace fs = std::filesystem;
using namespace greycone;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInternal = 2 };

// User-facing failure: bad path, bad program text, bad flag value.
struct UserError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string default_out() {
  const char* env = std::getenv("GREYCONE_OUT");
  return env && *env ? env : "greycone-out";
}

std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UserError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

InstrumentedProgram load_dut(const std::string& path) {
  if (!fs::is_regular_file(path)) throw UserError("no such DUT file '" + path + "'");
  try {
    return instrument(parse_file(path));
  } catch (const SyntaxError& e) {
    throw UserError(path + ": " + e.what());
  } catch (const TypeError& e) {
    throw UserError(path + ": " + e.what());
  }
}

struct CampaignFlags {
  std::string mode = "greycone";
  double target = 100.0;
  std::optional<std::uint64_t> budget_execs;
  std::optional<double> budget_secs;
  std::uint64_t fuzz_stall = 10'000;
  std::uint64_t conc_stall = 64;
  std::uint64_t seed = 0;
  std::string out = default_out();
  bool dump_predicates = false;

  void add(CLI::App* app, bool with_mode) {
    if (with_mode) {
      app->add_option("--mode", mode, "greycone | fuzz | concolic")
          ->check(CLI::IsMember({"greycone", "fuzz", "concolic", "fuzz-only", "concolic-only"}));
    }
    app->add_option("--target", target, "target branch coverage in percent");
    auto* be = app->add_option("--budget-execs", budget_execs, "execution budget");
    auto* bs = app->add_option("--budget-secs", budget_secs, "wall-clock budget in seconds");
    be->excludes(bs);
    app->add_option("--fuzz-stall", fuzz_stall, "executions without new coverage before a switch");
    app->add_option("--conc-stall", conc_stall, "solver calls without new coverage before a switch");
    app->add_option("--seed", seed, "rng seed");
    app->add_option("--out", out, "output directory (default $GREYCONE_OUT or greycone-out)");
  }

  CampaignConfig config() const {
    CampaignConfig c;
    c.mode = *parse_mode(mode);
    c.target_pct = target;
    c.budget_execs = budget_execs;
    if (budget_secs) c.time_cutoff = *budget_secs;
    c.fuzz_stall_execs = fuzz_stall;
    c.conc_stall_calls = conc_stall;
    c.rng_seed = seed;
    c.record_predicates = dump_predicates;
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw UserError(e.what());
    }
    return c;
  }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!(os << text)) throw UserError("cannot write '" + p.string() + "'");
}

int cmd_run(const std::string& dut, const CampaignFlags& f) {
  const InstrumentedProgram ip = load_dut(dut);
  const CampaignConfig cfg = f.config();
  const CampaignState st = run_campaign(ip, {}, cfg);
  write_campaign_dir(f.out, dut, ip, cfg, st);
  std::cout << ip.program.name << " mode=" << mode_name(cfg.mode) << " coverage=";
  char pct[16];
  std::snprintf(pct, sizeof pct, "%.1f", st.final_pct);
  std::cout << pct << "% tests=" << st.queue.size() << " executions=" << st.executions
            << " phases=" << st.phase_log.size() << " crashes=" << st.crashes << "\n";
  std::cout << "wrote " << (fs::path(f.out) / "coverage.lcov").string() << "\n";
  return kOk;
}

int cmd_bench(const std::string& corpus, unsigned jobs, const CampaignFlags& f) {
  if (!fs::is_directory(corpus)) throw UserError("no such corpus directory '" + corpus + "'");
  const auto files = corpus_files(corpus);
  if (files.empty()) throw UserError("no .dut files in '" + corpus + "'");
  for (const auto& p : files) load_dut(p.string());
  const CampaignConfig cfg = f.config();
  const auto rows = run_bench(files, cfg, jobs);
  const std::string table = bench_table(rows);
  std::error_code ec;
  fs::create_directories(f.out, ec);
  if (ec) throw UserError("cannot create '" + f.out + "': " + ec.message());
  write_text(fs::path(f.out) / "bench.txt", table);
  write_text(fs::path(f.out) / "bench.csv", bench_csv(rows));
  write_text(fs::path(f.out) / "stats.json", bench_stats_json(rows));
  std::cout << table;
  return kOk;
}

int cmd_parse_check(const std::vector<std::string>& files, bool dump) {
  for (const auto& path : files) {
    const InstrumentedProgram ip = load_dut(path);
    std::cout << path << ": ok inputs=" << ip.program.inputs.size()
              << " input_bytes=" << ip.program.input_bytes()
              << " blocks=" << ip.program.blocks.size() << " edges=" << ip.edges.size()
              << " branch_edges=" << ip.branch_edge_count << "\n";
    if (dump) std::cout << dump_cfg(ip.program);
  }
  return kOk;
}

int cmd_solve(const std::string& path, std::uint64_t budget) {
  PathPredicate p;
  try {
    p = parse_predicate(read_text(path));
  } catch (const SexpError& e) {
    throw UserError(path + ": " + e.what());
  }
  SolveOptions opt;
  opt.budget = budget;
  SolverResult r;
  try {
    r = solve(p, opt);
  } catch (const UnsupportedExpr& e) {
    throw UserError(path + ": " + e.what());
  }
  std::cout << status_name(r.status) << "\n";
  for (const auto& m : r.model) {
    std::cout << m.var.name << " : " << type_name(m.var.type) << " = "
              << to_numeric(m.value, m.var.type) << "\n";
  }
  std::cout << "nodes=" << r.stats.nodes_explored << " simplifications=" << r.stats.simplifications
            << "\n";
  return kOk;
}

// Minimal reader for the key = value lines written by campaign_toml.
std::map<std::string, std::string> read_toml(const std::string& path) {
  std::map<std::string, std::string> kv;
  std::istringstream is(read_text(path));
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    std::string value = line.substr(eq + 3);
    if (!value.empty() && value.front() == '"') {
      try {
        value = nlohmann::json::parse(value).get<std::string>();
      } catch (const nlohmann::json::exception&) {
        throw UserError(path + ": malformed string for " + line.substr(0, eq));
      }
    }
    kv[line.substr(0, eq)] = value;
  }
  return kv;
}

int cmd_report(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw UserError("no such campaign directory '" + dir + "'");
  const auto kv = read_toml((root / "campaign.toml").string());
  if (!kv.count("dut")) throw UserError((root / "campaign.toml").string() + ": missing dut");
  const std::string dut = kv.at("dut");
  const InstrumentedProgram ip = load_dut(dut);
  std::uint64_t step_limit = kDefaultStepLimit;
  if (kv.count("step_limit")) step_limit = std::stoull(kv.at("step_limit"));
  const auto tests = read_queue_dir(root / "queue");
  const CoverageMap m = replay_tests(ip, tests, step_limit);
  const std::string lcov = emit_lcov(m, ip, dut);
  write_text(root / "coverage.lcov", lcov);
  bool secs = false;
  std::vector<SeriesPoint> series;
  try {
    series = series_from_stats(read_text((root / "stats.json").string()), &secs);
  } catch (const ReportError& e) {
    throw UserError((root / "stats.json").string() + ": " + e.what());
  }
  write_text(root / "series.csv", series_csv(series, secs));
  const LcovTotals t = parse_lcov_totals(lcov);
  char pct[16];
  std::snprintf(pct, sizeof pct, "%.1f", coverage_pct(m, ip));
  std::cout << "tests=" << tests.size() << " BRF=" << t.found << " BRH=" << t.hit
            << " coverage=" << pct << "%\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid greybox fuzzing and concolic test generation for MiniDUT programs"};
  app.require_subcommand(1);

  CampaignFlags run_flags;
  std::string run_dut;
  auto* run = app.add_subcommand("run", "run one campaign");
  run->add_option("--dut", run_dut, "MiniDUT source file")->required();
  run_flags.add(run, true);
  run->add_flag("--dump-predicates", run_flags.dump_predicates,
                "write every solved path predicate to predicates.sexp");

  CampaignFlags bench_flags;
  std::string corpus = "corpus";
  unsigned jobs = 1;
  auto* bench = app.add_subcommand("bench", "every corpus program under all three modes");
  bench->add_option("--corpus", corpus, "directory of .dut files");
  bench->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  bench_flags.add(bench, false);

  std::vector<std::string> check_files;
  bool dump = false;
  auto* check = app.add_subcommand("parse-check", "parse and lower MiniDUT files");
  check->add_option("files", check_files, "MiniDUT source files")->required();
  check->add_flag("--dump-cfg", dump, "print the lowered CFG");

  std::string pred_file;
  std::uint64_t budget = kDefaultSolverBudget;
  auto* solve_cmd = app.add_subcommand("solve", "solve a dumped path predicate");
  solve_cmd->add_option("file", pred_file, "predicate dump")->required();
  solve_cmd->add_option("--budget", budget, "search node budget");

  std::string report_dir = default_out();
  auto* report = app.add_subcommand("report", "regenerate LCOV and series from a campaign directory");
  report->add_option("dir", report_dir, "campaign directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return cmd_run(run_dut, run_flags);
    if (*bench) return cmd_bench(corpus, jobs, bench_flags);
    if (*check) return cmd_parse_check(check_files, dump);
    if (*solve_cmd) return cmd_solve(pred_file, budget);
    if (*report) return cmd_report(report_dir);
  } catch (const UserError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ReportError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
