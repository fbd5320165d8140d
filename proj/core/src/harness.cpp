#include "gem/harness.hpp"

#include "gem/digest.hpp"
#include "gem/errors.hpp"
#include "gem/segmentation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <functional>
#include <thread>

namespace gem {

namespace {

constexpr std::array<Solution, 4> kCanonicalOrder = {Solution::AdChat, Solution::GiR,
                                                     Solution::GirR, Solution::GirP};

std::optional<double> mean_defined(const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::string utc_timestamp(bool deterministic) {
  if (deterministic) return "1970-01-01T00:00:00Z";
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string compact_stamp(const std::string& iso) {
  std::string out;
  for (char c : iso) {
    if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(c);
  }
  return out;
}

std::string options_digest(const DatasetBundle& bundle, const BenchOptions& options) {
  std::string canon = bundle.name + "|" + to_string(bundle.mode);
  for (const auto& cfg : options.solutions) {
    canon += "|" + to_string(cfg.solution) + "," + cfg.base_model + "," + cfg.embed_model +
             "," + std::to_string(cfg.t) + "," + std::to_string(cfg.k) + "," +
             to_string(cfg.dataset_mode) + "," + cfg.ad_sentence_template;
  }
  for (const auto& j : options.judges) canon += "|" + j;
  canon += "|ctr=" + options.ctr_mode;
  canon += "|baseline=" + std::to_string(options.cost_baseline ? 1 : 0);
  return hex_digest(canon);
}

// Simple index-sharded parallel for; results land in caller-owned slots so
// output order is independent of scheduling.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  int n = std::min<int>(workers, static_cast<int>(count));
  pool.reserve(static_cast<std::size_t>(n));
  for (int w = 0; w < n; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

CtrMode ctr_mode_of(const std::string& name) {
  if (name == "judge_click") return CtrMode::judge_click;
  return CtrMode::ground_truth;
}

bool ctr_enabled_for(const std::string& mode_name, const DatasetBundle& bundle) {
  if (mode_name == "off") return false;
  if (mode_name == "judge_click") return true;
  if (mode_name == "ground_truth") return true;
  // auto: ground truth only when relevance labels exist
  for (const auto& q : bundle.queries) {
    if (q.relevant_ad_ids) return true;
  }
  return false;
}

std::string products_text_for(const QueryRecord& record, const AdDatabase& db,
                              const std::string& ad_sentence_template) {
  if (!record.response || !record.response->injected_ad) return "none detected";
  const Ad* ad = db.find(*record.response->injected_ad);
  if (!ad) return "none detected";
  return render_ad_sentence(*ad, ad_sentence_template);
}

void prune_snapshots(const std::filesystem::path& dir, int keep) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("run-", 0) == 0 && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  while (files.size() > static_cast<std::size_t>(keep)) {
    std::filesystem::remove(files.front());
    files.erase(files.begin());
  }
}

}  // namespace

SolutionSummary compute_summary(const std::vector<QueryRecord>& records, Solution solution,
                                const std::vector<std::string>& judges, CtrMode ctr_mode,
                                bool ctr_enabled, const std::vector<Query>& queries,
                                bool cost_baseline) {
  SolutionSummary summary;
  summary.solution = solution;

  std::vector<const QueryRecord*> mine;
  for (const auto& r : records) {
    if (r.solution == solution) mine.push_back(&r);
  }
  summary.total = static_cast<long>(mine.size());

  std::vector<const QueryRecord*> ok;
  for (const auto* r : mine) {
    if (r->error || !r->response) {
      ++summary.excluded;
    } else {
      ok.push_back(r);
    }
  }

  auto collect = [&](auto getter) {
    std::vector<std::optional<double>> values;
    values.reserve(ok.size());
    for (const auto* r : ok) values.push_back(getter(*r));
    return mean_defined(values);
  };
  summary.quant.response_flow = collect([](const QueryRecord& r) { return r.quant.response_flow; });
  summary.quant.response_coherence =
      collect([](const QueryRecord& r) { return r.quant.response_coherence; });
  summary.quant.ad_flow = collect([](const QueryRecord& r) { return r.quant.ad_flow; });
  summary.quant.ad_coherence = collect([](const QueryRecord& r) { return r.quant.ad_coherence; });

  std::vector<AdInjectedResponse> responses;
  std::vector<Query> matched_queries;
  responses.reserve(ok.size());
  for (const auto* r : ok) {
    responses.push_back(*r->response);
    auto it = std::find_if(queries.begin(), queries.end(),
                           [&](const Query& q) { return q.id == r->query_id; });
    matched_queries.push_back(it != queries.end() ? *it : Query{});
  }
  if (!responses.empty()) {
    summary.quant.injection_rate = injection_rate(responses);
    if (ctr_enabled) {
      if (ctr_mode == CtrMode::ground_truth) {
        summary.quant.ctr = click_through_rate(responses, matched_queries,
                                               CtrMode::ground_truth);
      } else {
        // judge_click: Click verdicts from the primary judge
        std::vector<std::optional<double>> clicks;
        clicks.reserve(ok.size());
        const std::string primary = judges.empty() ? std::string() : judges.front();
        for (const auto* r : ok) {
          std::optional<double> score;
          for (const auto& v : r->verdicts) {
            if (v.metric == JudgeMetric::Click && v.judge_model == primary && v.parseable()) {
              score = static_cast<double>(v.score);
            }
          }
          clicks.push_back(score);
        }
        summary.quant.ctr =
            click_through_rate(responses, matched_queries, CtrMode::judge_click, &clicks);
      }
    }
  }
  try {
    summary.quant_overall = quantitative_overall(summary.quant);
  } catch (const PreconditionError&) {
    summary.quant_overall = std::nullopt;
  }

  for (const auto& judge_model : judges) {
    std::array<std::optional<double>, 6> per_metric;
    for (std::size_t m = 0; m < kAllJudgeMetrics.size(); ++m) {
      std::vector<std::optional<double>> scores;
      for (const auto* r : ok) {
        std::optional<double> score;
        for (const auto& v : r->verdicts) {
          if (v.metric == kAllJudgeMetrics[m] && v.judge_model == judge_model) {
            if (v.parseable()) {
              score = static_cast<double>(v.score);
            } else {
              ++summary.unparseable_verdicts;
            }
          }
        }
        scores.push_back(score);
      }
      per_metric[m] = mean_defined(scores);
    }
    summary.qual_by_judge[judge_model] = per_metric;
    std::vector<double> defined;
    for (const auto& v : per_metric) {
      if (v) defined.push_back(*v);
    }
    summary.qual_overall_by_judge[judge_model] =
        defined.empty() ? std::nullopt : std::optional<double>(qualitative_overall(defined));
  }

  if (!ok.empty()) {
    double sum_i = 0.0, sum_o = 0.0;
    for (const auto* r : ok) {
      sum_i += static_cast<double>(ittft(r->trace, cost_baseline));
      sum_o += static_cast<double>(ottft(r->trace, cost_baseline));
    }
    summary.mean_ittft = sum_i / static_cast<double>(ok.size());
    summary.mean_ottft = sum_o / static_cast<double>(ok.size());
    summary.cost = cost_overall(*summary.mean_ittft, *summary.mean_ottft);
  }
  return summary;
}

std::vector<RunSnapshot> run_benchmark(const DatasetBundle& bundle, const BenchOptions& options,
                                       Gateway& gateway) {
  if (options.solutions.empty()) throw PreconditionError("run_benchmark: no solutions");
  if (options.runs < 1) throw PreconditionError("run_benchmark: runs must be >= 1");
  if (options.keep < 1) throw PreconditionError("run_benchmark: keep must be >= 1");
  std::filesystem::create_directories(options.out_dir);

  const PromptSet prompts = options.prompt_dir.empty() ? PromptSet::builtin()
                                                       : PromptSet::load(options.prompt_dir);
  const MetricCatalog catalog = options.prompt_dir.empty()
                                    ? MetricCatalog::builtin()
                                    : MetricCatalog::load(options.prompt_dir);

  // One index per embedding model; built before the repetition loop.
  std::map<std::string, AdIndex> indexes;
  for (const auto& cfg : options.solutions) {
    if (!indexes.count(cfg.embed_model)) {
      indexes.emplace(cfg.embed_model,
                      build_index(bundle.addb, gateway, cfg.embed_model));
    }
  }

  const std::string digest = options_digest(bundle, options);
  const bool ctr_enabled = ctr_enabled_for(options.ctr_mode, bundle);
  const CtrMode ctr_mode = ctr_mode_of(options.ctr_mode);

  std::vector<RunSnapshot> snapshots;
  for (int rep = 1; rep <= options.runs; ++rep) {
    RunSnapshot snapshot;
    snapshot.run_id = bundle.name + "-" + digest.substr(0, 8);
    snapshot.config_digest = digest;
    snapshot.dataset_name = bundle.name;
    snapshot.mode = bundle.mode;
    snapshot.created_at = utc_timestamp(gateway.deterministic());
    snapshot.judges = options.judges;
    snapshot.records.resize(options.solutions.size() * bundle.queries.size());

    for (std::size_t s = 0; s < options.solutions.size(); ++s) {
      const SolutionConfig& cfg = options.solutions[s];
      const AdIndex& index = indexes.at(cfg.embed_model);
      parallel_for(bundle.queries.size(), options.workers, [&](std::size_t qi) {
        const Query& query = bundle.queries[qi];
        QueryRecord record;
        record.query_id = query.id;
        record.solution = cfg.solution;
        try {
          PipelineRun run = run_solution(query, cfg, index, gateway, prompts);
          record.generator_text = run.generator_text;
          record.trace = std::move(run.trace);
          record.flags = run.flags;
          record.structured_markdown = contains_structured_markdown(run.response.text);
          if (run.response.has_ad() &&
              (run.response.ad_sentence_indices.count(0) ||
               run.response.ad_sentence_indices.count(run.response.segmented.size() - 1))) {
            record.flags.boundary_ad = true;
          }
          record.quant.response_flow = response_flow(run.response.segmented);
          record.quant.response_coherence = response_coherence(run.response.segmented);
          record.quant.ad_flow = ad_flow(run.response);
          record.quant.ad_coherence = ad_coherence(run.response);
          record.response = std::move(run.response);
          const std::string products =
              products_text_for(record, bundle.addb, cfg.ad_sentence_template);
          for (const auto& judge_model : options.judges) {
            for (auto metric : kAllJudgeMetrics) {
              record.verdicts.push_back(judge(query.text, *record.response, metric,
                                              judge_model, gateway, catalog, products, 2,
                                              &record.trace));
            }
          }
        } catch (const Error& e) {
          record.error = e.what();
        }
        snapshot.records[s * bundle.queries.size() + qi] = std::move(record);
      });
    }

    for (auto solution : kCanonicalOrder) {
      bool present = std::any_of(options.solutions.begin(), options.solutions.end(),
                                 [&](const SolutionConfig& c) { return c.solution == solution; });
      if (!present) continue;
      snapshot.summaries.push_back(compute_summary(snapshot.records, solution, options.judges,
                                                   ctr_mode, ctr_enabled, bundle.queries,
                                                   options.cost_baseline));
    }

    char rep_tag[16];
    std::snprintf(rep_tag, sizeof(rep_tag), "r%02d", rep);
    const std::string file_name = "run-" + compact_stamp(snapshot.created_at) + "-" + rep_tag +
                                  "-" + digest.substr(0, 8) + ".json";
    save_snapshot(snapshot, options.out_dir / file_name);
    prune_snapshots(options.out_dir, options.keep);
    snapshots.push_back(std::move(snapshot));
  }
  return snapshots;
}

}  // namespace gem
