#include "gem/harness.hpp"

#include "gem/errors.hpp"

#include <algorithm>
#include <fstream>

namespace gem {

namespace {

using nlohmann::json;

json optional_to_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> optional_from_json(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

json quant_to_json(const QuantScores& q) {
  return json{{"response_flow", optional_to_json(q.response_flow)},
              {"response_coherence", optional_to_json(q.response_coherence)},
              {"ad_flow", optional_to_json(q.ad_flow)},
              {"ad_coherence", optional_to_json(q.ad_coherence)},
              {"injection_rate", optional_to_json(q.injection_rate)},
              {"ctr", optional_to_json(q.ctr)}};
}

QuantScores quant_from_json(const json& j) {
  QuantScores q;
  q.response_flow = optional_from_json(j, "response_flow");
  q.response_coherence = optional_from_json(j, "response_coherence");
  q.ad_flow = optional_from_json(j, "ad_flow");
  q.ad_coherence = optional_from_json(j, "ad_coherence");
  q.injection_rate = optional_from_json(j, "injection_rate");
  q.ctr = optional_from_json(j, "ctr");
  return q;
}

json verdict_to_json(const JudgeVerdict& v) {
  return json{{"metric", to_string(v.metric)},
              {"category", v.category},
              {"score", v.score},
              {"judge_model", v.judge_model},
              {"raw_output", v.raw_output}};
}

JudgeVerdict verdict_from_json(const json& j) {
  JudgeVerdict v;
  v.metric = judge_metric_from_string(j.at("metric").get<std::string>());
  v.category = j.at("category").get<std::string>();
  v.score = j.at("score").get<int>();
  v.judge_model = j.at("judge_model").get<std::string>();
  v.raw_output = j.value("raw_output", std::string());
  return v;
}

json flags_to_json(const PipelineFlags& f) {
  return json{{"rewrite_fallback", f.rewrite_fallback},
              {"llm_choice_fallback", f.llm_choice_fallback},
              {"empty_retrieval", f.empty_retrieval},
              {"single_sentence_append", f.single_sentence_append},
              {"boundary_ad", f.boundary_ad}};
}

PipelineFlags flags_from_json(const json& j) {
  PipelineFlags f;
  f.rewrite_fallback = j.value("rewrite_fallback", false);
  f.llm_choice_fallback = j.value("llm_choice_fallback", false);
  f.empty_retrieval = j.value("empty_retrieval", false);
  f.single_sentence_append = j.value("single_sentence_append", false);
  f.boundary_ad = j.value("boundary_ad", false);
  return f;
}

json record_to_json(const QueryRecord& r) {
  json j{{"query_id", r.query_id},
         {"solution", to_string(r.solution)},
         {"generator_text", r.generator_text},
         {"trace", to_json(r.trace)},
         {"quant", quant_to_json(r.quant)},
         {"flags", flags_to_json(r.flags)},
         {"structured_markdown", r.structured_markdown}};
  j["response"] = r.response ? to_json(*r.response) : json(nullptr);
  json verdicts = json::array();
  for (const auto& v : r.verdicts) verdicts.push_back(verdict_to_json(v));
  j["verdicts"] = std::move(verdicts);
  j["error"] = r.error ? json(*r.error) : json(nullptr);
  return j;
}

QueryRecord record_from_json(const json& j) {
  QueryRecord r;
  r.query_id = j.at("query_id").get<std::string>();
  r.solution = solution_from_string(j.at("solution").get<std::string>());
  if (!j.at("response").is_null()) r.response = response_from_json(j["response"]);
  r.generator_text = j.value("generator_text", std::string());
  r.trace = trace_from_json(j.at("trace"));
  r.quant = quant_from_json(j.at("quant"));
  for (const auto& v : j.at("verdicts")) r.verdicts.push_back(verdict_from_json(v));
  r.flags = flags_from_json(j.at("flags"));
  r.structured_markdown = j.value("structured_markdown", false);
  if (j.contains("error") && !j["error"].is_null()) r.error = j["error"].get<std::string>();
  return r;
}

json summary_to_json(const SolutionSummary& s) {
  json qual = json::object();
  for (const auto& [judge_model, metrics] : s.qual_by_judge) {
    json per_metric = json::object();
    for (std::size_t i = 0; i < kAllJudgeMetrics.size(); ++i) {
      per_metric[to_string(kAllJudgeMetrics[i])] = optional_to_json(metrics[i]);
    }
    qual[judge_model] = std::move(per_metric);
  }
  json qual_overall = json::object();
  for (const auto& [judge_model, value] : s.qual_overall_by_judge) {
    qual_overall[judge_model] = optional_to_json(value);
  }
  return json{{"solution", to_string(s.solution)},
              {"quant", quant_to_json(s.quant)},
              {"quant_overall", optional_to_json(s.quant_overall)},
              {"qual_by_judge", std::move(qual)},
              {"qual_overall_by_judge", std::move(qual_overall)},
              {"mean_ittft", optional_to_json(s.mean_ittft)},
              {"mean_ottft", optional_to_json(s.mean_ottft)},
              {"cost", optional_to_json(s.cost)},
              {"excluded", s.excluded},
              {"total", s.total},
              {"unparseable_verdicts", s.unparseable_verdicts}};
}

SolutionSummary summary_from_json(const json& j) {
  SolutionSummary s;
  s.solution = solution_from_string(j.at("solution").get<std::string>());
  s.quant = quant_from_json(j.at("quant"));
  s.quant_overall = optional_from_json(j, "quant_overall");
  for (const auto& [judge_model, per_metric] : j.at("qual_by_judge").items()) {
    std::array<std::optional<double>, 6> metrics;
    for (std::size_t i = 0; i < kAllJudgeMetrics.size(); ++i) {
      metrics[i] = optional_from_json(per_metric, to_string(kAllJudgeMetrics[i]).c_str());
    }
    s.qual_by_judge[judge_model] = metrics;
  }
  for (const auto& [judge_model, value] : j.at("qual_overall_by_judge").items()) {
    s.qual_overall_by_judge[judge_model] =
        value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
  }
  s.mean_ittft = optional_from_json(j, "mean_ittft");
  s.mean_ottft = optional_from_json(j, "mean_ottft");
  s.cost = optional_from_json(j, "cost");
  s.excluded = j.value("excluded", 0L);
  s.total = j.value("total", 0L);
  s.unparseable_verdicts = j.value("unparseable_verdicts", 0L);
  return s;
}

}  // namespace

json to_json(const RunSnapshot& snapshot) {
  json records = json::array();
  for (const auto& r : snapshot.records) records.push_back(record_to_json(r));
  json summaries = json::array();
  for (const auto& s : snapshot.summaries) summaries.push_back(summary_to_json(s));
  return json{{"run_id", snapshot.run_id},
              {"config_digest", snapshot.config_digest},
              {"dataset_name", snapshot.dataset_name},
              {"mode", to_string(snapshot.mode)},
              {"created_at", snapshot.created_at},
              {"judges", snapshot.judges},
              {"records", std::move(records)},
              {"summaries", std::move(summaries)}};
}

RunSnapshot snapshot_from_json(const json& j) {
  RunSnapshot s;
  s.run_id = j.at("run_id").get<std::string>();
  s.config_digest = j.at("config_digest").get<std::string>();
  s.dataset_name = j.at("dataset_name").get<std::string>();
  s.mode = dataset_mode_from_string(j.at("mode").get<std::string>());
  s.created_at = j.at("created_at").get<std::string>();
  s.judges = j.at("judges").get<std::vector<std::string>>();
  for (const auto& r : j.at("records")) s.records.push_back(record_from_json(r));
  for (const auto& x : j.at("summaries")) s.summaries.push_back(summary_from_json(x));
  return s;
}

void save_snapshot(const RunSnapshot& snapshot, const std::filesystem::path& file) {
  // write-temp-then-rename keeps interrupted runs from leaving torn files
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write snapshot " + file.string());
    out << to_json(snapshot).dump(2) << '\n';
  }
  std::filesystem::rename(tmp, file);
}

RunSnapshot load_snapshot(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot open snapshot " + file.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DataError("malformed snapshot " + file.string());
  return snapshot_from_json(j);
}

std::vector<RunSnapshot> load_snapshots(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("run-", 0) == 0 && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<RunSnapshot> snapshots;
  snapshots.reserve(files.size());
  for (const auto& f : files) snapshots.push_back(load_snapshot(f));
  return snapshots;
}

}  // namespace gem
