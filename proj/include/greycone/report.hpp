#pragma once

// Report emitters: LCOV branch records, campaign directories, benchmark
// tables and the coverage-over-time series.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "greycone/coverage.hpp"
#include "greycone/dut.hpp"
#include "greycone/orchestrator.hpp"

namespace greycone {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// TN/SF header, one BRDA per branch-site outcome (taken count or '-'),
/// BRF/BRH totals and end_of_record.
std::string emit_lcov(const CoverageMap& m, const InstrumentedProgram& ip,
                      const std::string& source_path);

struct LcovTotals {
  std::size_t found = 0;  // BRF
  std::size_t hit = 0;    // BRH
  std::size_t brda = 0;   // BRDA lines seen
};

/// Sums BRF/BRH over all records of an LCOV text.
LcovTotals parse_lcov_totals(std::string_view text);

/// Coverage of a test suite: each test run once, hits accumulated.
CoverageMap replay_tests(const InstrumentedProgram& ip, const std::vector<TestCase>& tests,
                         std::uint64_t step_limit = kDefaultStepLimit);

struct RunRecord {
  std::string benchmark;
  Mode mode = Mode::Greycone;
  std::uint64_t seed = 0;
  std::size_t tests = 0;  // unique queue entries
  double final_pct = 0;
  bool target_reached = false;
  std::uint64_t executions = 0;
  std::uint64_t execs_to_final = 0;
  double secs_to_final = 0;
  std::optional<std::uint64_t> execs_to_target;
  std::size_t crashes = 0;
  std::vector<SeriesPoint> series;
  std::vector<PhaseReport> phases;
  std::size_t branch_edges = 0;
  std::size_t covered_branch_edges = 0;
  bool with_seconds = false;  // wall-clock fields are emitted only when set
};

RunRecord make_record(const std::string& benchmark, const InstrumentedProgram& ip,
                      const CampaignConfig& cfg, const CampaignState& st);

std::string phase_label(const PhaseReport& p);  // fuzz_1, conc_1, ...

std::string stats_json(const RunRecord& r);
std::string tree_stats_json(const CampaignState& st);
std::string series_csv(const std::vector<SeriesPoint>& s, bool with_seconds);
std::string campaign_toml(const std::string& dut_path, const CampaignConfig& cfg);

/// Series stored in a stats.json document. Throws ReportError.
std::vector<SeriesPoint> series_from_stats(std::string_view json_text, bool* with_seconds = nullptr);

/// Queue file name: id:000003,src:fuzz
std::string queue_file_name(const TestCase& t);

/// Writes campaign.toml, stats.json, tree_stats.json, series.csv,
/// coverage.lcov, queue/ and (when recorded) predicates.sexp.
void write_campaign_dir(const std::filesystem::path& dir, const std::string& dut_path,
                        const InstrumentedProgram& ip, const CampaignConfig& cfg,
                        const CampaignState& st);

/// Reads queue/ back in file-name order.
std::vector<TestCase> read_queue_dir(const std::filesystem::path& dir);

// -- benchmark ----------------------------------------------------------------

/// Sorted .dut files of a directory.
std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& dir);

/// Every file under every mode, rows ordered by (file, mode). `jobs` worker
/// threads run campaigns; rows are assembled after all of them finish.
std::vector<RunRecord> run_bench(const std::vector<std::filesystem::path>& files,
                                 const CampaignConfig& base, unsigned jobs);

std::string bench_table(const std::vector<RunRecord>& rows);
std::string bench_csv(const std::vector<RunRecord>& rows);
std::string bench_stats_json(const std::vector<RunRecord>& rows);

}  // namespace greycone
