#pragma once

#include "gem/cost.hpp"
#include "gem/dataset.hpp"
#include "gem/gateway.hpp"
#include "gem/index.hpp"
#include "gem/judge.hpp"
#include "gem/pipelines.hpp"
#include "gem/quant_metrics.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gem {

// --- Snapshots -------------------------------------------------------------

struct QueryRecord {
  std::string query_id;
  Solution solution = Solution::Custom;
  std::optional<AdInjectedResponse> response;  // absent on failure
  std::string generator_text;                  // ad-free generate output (Ad-LLM)
  PipelineTrace trace;                         // pipeline + judge calls
  QuantScores quant;                           // per-response metrics
  std::vector<JudgeVerdict> verdicts;          // all (metric, judge) verdicts
  PipelineFlags flags;
  bool structured_markdown = false;
  std::optional<std::string> error;
};

struct SolutionSummary {
  Solution solution = Solution::Custom;
  QuantScores quant;  // snapshot-level means, incl. injection rate and CTR
  std::optional<double> quant_overall;
  // judge model -> per-metric mean scores (kAllJudgeMetrics order)
  std::map<std::string, std::array<std::optional<double>, 6>> qual_by_judge;
  std::map<std::string, std::optional<double>> qual_overall_by_judge;
  std::optional<double> mean_ittft;
  std::optional<double> mean_ottft;
  std::optional<double> cost;
  long excluded = 0;  // failed queries, left out of every mean
  long total = 0;
  long unparseable_verdicts = 0;
};

struct RunSnapshot {
  std::string run_id;
  std::string config_digest;
  std::string dataset_name;
  DatasetMode mode = DatasetMode::chatbot;
  std::string created_at;
  std::vector<std::string> judges;
  std::vector<QueryRecord> records;
  std::vector<SolutionSummary> summaries;
};

nlohmann::json to_json(const RunSnapshot& snapshot);
RunSnapshot snapshot_from_json(const nlohmann::json& j);

void save_snapshot(const RunSnapshot& snapshot, const std::filesystem::path& file);
RunSnapshot load_snapshot(const std::filesystem::path& file);
// All run-*.json files in the directory, sorted by filename.
std::vector<RunSnapshot> load_snapshots(const std::filesystem::path& dir);

// Recomputes a solution's summary from the snapshot's records; saving and
// aggregation share this so a reload always reproduces the stored summary.
SolutionSummary compute_summary(const std::vector<QueryRecord>& records, Solution solution,
                                const std::vector<std::string>& judges, CtrMode ctr_mode,
                                bool ctr_enabled, const std::vector<Query>& queries,
                                bool cost_baseline);

// --- Benchmark runner --------------------------------------------------------

struct BenchOptions {
  std::vector<SolutionConfig> solutions;
  std::vector<std::string> judges;
  int runs = 1;
  int keep = 3;
  int workers = 4;
  std::filesystem::path out_dir;
  std::string ctr_mode = "auto";  // auto | ground_truth | judge_click | off
  bool cost_baseline = false;
  std::filesystem::path prompt_dir;
};

// Executes runs x (solution x query) pipelines, computes quantitative
// metrics, collects all (query, metric, judge) verdicts, and persists one
// snapshot per repetition (atomic write, oldest beyond `keep` removed).
// Per-query failures are recorded in the snapshot and excluded from means;
// the run continues.
std::vector<RunSnapshot> run_benchmark(const DatasetBundle& bundle, const BenchOptions& options,
                                       Gateway& gateway);

// --- Reports ----------------------------------------------------------------

struct BenchReport {
  std::string dataset_name;
  int snapshot_count = 0;
  std::string primary_judge;
  std::vector<std::string> judges;

  struct QuantRow {
    Solution solution;
    QuantScores scores;
    double overall = 0.0;
  };
  struct QualRow {
    Solution solution;
    std::array<std::optional<double>, 6> metrics;  // kAllJudgeMetrics order
    double overall = 0.0;
  };
  struct JudgeRow {
    Solution solution;
    std::vector<std::optional<double>> overall_by_judge;
  };
  struct CostRow {
    Solution solution;
    CostReport cost;
  };
  struct ExclusionRow {
    Solution solution;
    long excluded = 0;
    long total = 0;
    long unparseable_verdicts = 0;
  };

  std::vector<QuantRow> quantitative;
  std::vector<QualRow> qualitative;
  std::vector<JudgeRow> multi_judge;
  std::vector<CostRow> cost;
  std::vector<ExclusionRow> exclusions;
};

// Mean per cell over queries then over snapshots; every Overall column is
// recomputed from the aggregated cells, never trusted from storage.
BenchReport aggregate(const std::vector<RunSnapshot>& snapshots);

enum class ReportFormat { csv, markdown, json };

ReportFormat report_format_from_string(const std::string& s);

std::string render_markdown(const BenchReport& report);
std::string render_csv(const BenchReport& report);
nlohmann::json render_json(const BenchReport& report);

// Writes report.<ext> under `path` (a directory); bit-stable for identical
// reports.
std::filesystem::path emit_report(const BenchReport& report, ReportFormat format,
                                  const std::filesystem::path& path);

}  // namespace gem
