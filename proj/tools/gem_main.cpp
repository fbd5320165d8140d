#include "gem/config.hpp"
#include "gem/dataset.hpp"
#include "gem/errors.hpp"
#include "gem/harness.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <set>

namespace {

using namespace gem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitBackend = 3;

struct CliOverrides {
  std::optional<std::string> backend;
  std::optional<std::string> base_url;
  std::optional<std::string> base_model;
  std::optional<std::string> embed_model;
  std::optional<std::string> judges_csv;
  std::optional<int> runs, keep, t, k, workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> cache_dir;
  std::optional<std::string> ctr_mode;
  std::optional<std::string> prompt_dir;
  bool cost_baseline = false;
};

RunConfig effective_config(const std::string& config_path, const CliOverrides& o) {
  std::filesystem::path path = config_path;
  if (config_path.empty() && std::filesystem::exists("gem.toml")) path = "gem.toml";
  RunConfig cfg = RunConfig::from_file(path);
  if (o.backend) cfg.backend = *o.backend;
  if (o.base_url) cfg.base_url = *o.base_url;
  if (o.base_model) cfg.base_model = *o.base_model;
  if (o.embed_model) cfg.embed_model = *o.embed_model;
  if (o.judges_csv) cfg.judges = split_csv(*o.judges_csv);
  if (o.runs) cfg.runs = *o.runs;
  if (o.keep) cfg.keep = *o.keep;
  if (o.t) cfg.t = *o.t;
  if (o.k) cfg.k = *o.k;
  if (o.workers) cfg.workers = *o.workers;
  if (o.seed) cfg.stub_seed = *o.seed;
  if (o.cache_dir) cfg.cache_dir = *o.cache_dir;
  if (o.ctr_mode) cfg.ctr_mode = *o.ctr_mode;
  if (o.prompt_dir) cfg.prompt_dir = *o.prompt_dir;
  if (o.cost_baseline) cfg.cost_baseline = true;
  return cfg;
}

std::shared_ptr<Backend> make_backend(const RunConfig& cfg) {
  if (cfg.backend == "stub") {
    StubConfig stub;
    stub.seed = cfg.stub_seed;
    stub.dimension = cfg.stub_dimension;
    return std::make_shared<StubBackend>(stub);
  }
  if (cfg.backend == "http") {
    if (cfg.base_url.empty()) {
      throw PreconditionError("http backend requires backend.base_url (or --base-url)");
    }
    HttpBackendConfig http;
    http.base_url = cfg.base_url;
    if (const char* key = std::getenv(cfg.api_key_env.c_str())) {
      http.api_key = key;
    } else if (const char* fallback = std::getenv("OPENAI_API_KEY")) {
      http.api_key = fallback;
    }
    return std::make_shared<HttpBackend>(http);
  }
  throw PreconditionError("unknown backend \"" + cfg.backend + "\" (expected stub or http)");
}

Gateway make_gateway(const RunConfig& cfg) {
  GatewayConfig gw;
  gw.retry_limit = cfg.retry_limit;
  gw.backoff_base = std::chrono::milliseconds(cfg.backoff_ms);
  gw.concurrency_limit = cfg.concurrency;
  gw.cache_dir = cfg.cache_dir;
  return Gateway(make_backend(cfg), gw);
}

std::vector<SolutionConfig> parse_solutions(const std::string& csv, const RunConfig& cfg,
                                            DatasetMode mode) {
  std::vector<SolutionConfig> out;
  for (const auto& name : split_csv(csv)) {
    SolutionConfig sc;
    try {
      sc.solution = solution_from_string(name);
    } catch (const DataError&) {
      throw PreconditionError("unknown solution \"" + name +
                              "\" (expected Ad-Chat, GI-R, GIR-R, or GIR-P)");
    }
    sc.base_model = cfg.base_model;
    sc.embed_model = cfg.embed_model;
    sc.t = cfg.t;
    sc.k = cfg.k;
    sc.dataset_mode = mode;
    out.push_back(std::move(sc));
  }
  if (out.empty()) throw PreconditionError("--solution requires at least one name");
  return out;
}

int cmd_run(const std::string& dataset_dir, const std::string& solutions_csv,
            const std::string& out_dir, const std::string& config_path,
            const CliOverrides& overrides) {
  RunConfig cfg = effective_config(config_path, overrides);
  DatasetBundle bundle = load_dataset(dataset_dir);
  Gateway gateway = make_gateway(cfg);

  BenchOptions options;
  options.solutions = parse_solutions(solutions_csv, cfg, bundle.mode);
  options.judges = cfg.judges;
  options.runs = cfg.runs;
  options.keep = cfg.keep;
  options.workers = cfg.workers;
  options.out_dir = out_dir;
  options.ctr_mode = cfg.ctr_mode;
  options.cost_baseline = cfg.cost_baseline;
  options.prompt_dir = cfg.prompt_dir;

  auto snapshots = run_benchmark(bundle, options, gateway);
  std::cout << "dataset " << bundle.name << ": " << snapshots.size() << " run"
            << (snapshots.size() == 1 ? "" : "s") << " completed, snapshots in " << out_dir
            << "\n";
  for (const auto& summary : snapshots.back().summaries) {
    std::cout << "  " << to_string(summary.solution) << ": "
              << (summary.total - summary.excluded) << "/" << summary.total
              << " queries ok\n";
  }
  return kExitOk;
}

int cmd_evaluate(const std::string& snapshot_file, const std::string& judge_model,
                 const std::string& dataset_dir, const std::string& config_path,
                 const CliOverrides& overrides) {
  RunConfig cfg = effective_config(config_path, overrides);
  Gateway gateway = make_gateway(cfg);
  const MetricCatalog catalog = cfg.prompt_dir.empty() ? MetricCatalog::builtin()
                                                       : MetricCatalog::load(cfg.prompt_dir);

  RunSnapshot snapshot = load_snapshot(snapshot_file);
  std::vector<Query> queries;
  bool ctr_enabled = false;
  if (!dataset_dir.empty()) {
    DatasetBundle bundle = load_dataset(dataset_dir);
    queries = bundle.queries;
    for (const auto& q : queries) ctr_enabled |= q.relevant_ad_ids.has_value();
  }

  for (auto& record : snapshot.records) {
    if (!record.response) continue;
    std::erase_if(record.verdicts, [&](const JudgeVerdict& v) {
      return v.judge_model == judge_model;
    });
    std::string question = record.query_id;
    if (!queries.empty()) {
      auto it = std::find_if(queries.begin(), queries.end(),
                             [&](const Query& q) { return q.id == record.query_id; });
      if (it != queries.end()) question = it->text;
    }
    for (auto metric : kAllJudgeMetrics) {
      record.verdicts.push_back(judge(question, *record.response, metric, judge_model,
                                      gateway, catalog, "none detected", 2, &record.trace));
    }
  }
  if (std::find(snapshot.judges.begin(), snapshot.judges.end(), judge_model) ==
      snapshot.judges.end()) {
    snapshot.judges.push_back(judge_model);
  }

  std::set<Solution> solutions;
  for (const auto& r : snapshot.records) solutions.insert(r.solution);
  snapshot.summaries.clear();
  for (auto s : {Solution::AdChat, Solution::GiR, Solution::GirR, Solution::GirP}) {
    if (!solutions.count(s)) continue;
    snapshot.summaries.push_back(compute_summary(snapshot.records, s, snapshot.judges,
                                                 CtrMode::ground_truth, ctr_enabled, queries,
                                                 cfg.cost_baseline));
  }
  save_snapshot(snapshot, snapshot_file);
  std::cout << "re-judged " << snapshot_file << " with " << judge_model << "\n";
  return kExitOk;
}

int cmd_report(const std::string& in_dir, const std::string& format) {
  auto snapshots = load_snapshots(in_dir);
  if (snapshots.empty()) throw DataError("no snapshots under " + in_dir);
  BenchReport report = aggregate(snapshots);
  auto file = emit_report(report, report_format_from_string(format), in_dir);
  if (format == "markdown") std::cout << render_markdown(report);
  std::cout << "wrote " << file.string() << " (aggregated over " << report.snapshot_count
            << " snapshot" << (report.snapshot_count == 1 ? "" : "s") << ")\n";
  return kExitOk;
}

int cmd_validate(const std::string& dataset_dir) {
  DatasetBundle bundle = load_dataset(dataset_dir);
  std::cout << "ok: " << bundle.name << " (" << to_string(bundle.mode) << "), "
            << bundle.queries.size() << " queries, " << bundle.addb.ads.size() << " ads\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ad-injected response generation and evaluation benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "TOML config file (default: ./gem.toml when present)");

  CliOverrides overrides;
  std::string dataset_dir, solutions_csv, out_dir = "runs", snapshot_file, judge_model;
  std::string in_dir, format = "markdown";

  auto add_backend_opts = [&](CLI::App* cmd) {
    cmd->add_option("--backend", overrides.backend, "stub|http");
    cmd->add_option("--base-url", overrides.base_url, "OpenAI-compatible endpoint base URL");
    cmd->add_option("--base-model", overrides.base_model, "generation model id");
    cmd->add_option("--embed-model", overrides.embed_model, "embedding model id");
    cmd->add_option("--seed", overrides.seed, "stub backend seed");
    cmd->add_option("--cache-dir", overrides.cache_dir, "response cache directory");
    cmd->add_option("--prompt-dir", overrides.prompt_dir, "prompt template override directory");
  };

  CLI::App* run = app.add_subcommand("run", "run solutions over a dataset");
  run->add_option("--dataset", dataset_dir, "dataset directory")->required();
  run->add_option("--solution", solutions_csv, "comma-separated solution names")->required();
  add_backend_opts(run);
  run->add_option("--judge", overrides.judges_csv, "comma-separated judge model ids");
  run->add_option("--runs", overrides.runs, "repetitions");
  run->add_option("--keep", overrides.keep, "snapshots to retain");
  run->add_option("--t", overrides.t, "retrieval depth");
  run->add_option("--k", overrides.k, "ads to inject");
  run->add_option("--workers", overrides.workers, "query-level parallelism");
  run->add_option("--ctr-mode", overrides.ctr_mode, "auto|ground_truth|judge_click|off");
  run->add_flag("--cost-baseline", overrides.cost_baseline,
                "subtract the first generate call from token totals");
  run->add_option("--out", out_dir, "snapshot output directory");

  CLI::App* evaluate = app.add_subcommand("evaluate", "re-judge a snapshot with another judge");
  evaluate->add_option("--snapshot", snapshot_file, "snapshot file")->required();
  evaluate->add_option("--judge", judge_model, "judge model id")->required();
  evaluate->add_option("--dataset", dataset_dir, "dataset directory (for questions and CTR labels)");
  add_backend_opts(evaluate);

  CLI::App* report = app.add_subcommand("report", "aggregate snapshots into tables");
  report->add_option("--in", in_dir, "snapshot directory")->required();
  report->add_option("--format", format, "csv|markdown|json");

  CLI::App* validate = app.add_subcommand("validate", "validate a dataset directory");
  validate->add_option("--dataset", dataset_dir, "dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(dataset_dir, solutions_csv, out_dir, config_path, overrides);
    if (evaluate->parsed()) {
      return cmd_evaluate(snapshot_file, judge_model, dataset_dir, config_path, overrides);
    }
    if (report->parsed()) return cmd_report(in_dir, format);
    if (validate->parsed()) return cmd_validate(dataset_dir);
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const BackendError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBackend;
  }
  return kExitUsage;
}
