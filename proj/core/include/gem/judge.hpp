#pragma once

#include "gem/gateway.hpp"
#include "gem/model.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gem {

enum class JudgeMetric { Accuracy, Naturalness, Personality, Trust, Notice, Click };

inline constexpr std::array<JudgeMetric, 6> kAllJudgeMetrics = {
    JudgeMetric::Accuracy, JudgeMetric::Naturalness, JudgeMetric::Personality,
    JudgeMetric::Trust,    JudgeMetric::Notice,      JudgeMetric::Click,
};

std::string to_string(JudgeMetric metric);
JudgeMetric judge_metric_from_string(const std::string& s);

// Category name reserved for verdicts whose reply never produced a valid
// category; such verdicts are excluded from means and counted separately.
inline constexpr const char* kUnparseable = "UNPARSEABLE";

// Rank mapping: best -> 90, then 60, 30, worst -> 0.
int score_for_rank(std::size_t rank);

struct MetricSpec {
  JudgeMetric metric = JudgeMetric::Accuracy;
  std::vector<std::string> categories;  // best -> worst, exactly 4
  std::string system_template;          // rubric + few-shot examples + final format
  std::string user_template;            // {question}, {response}, maybe {products}
};

class MetricCatalog {
 public:
  // Embedded default prompts and category orders.
  static MetricCatalog builtin();
  // Overrides from <dir>/<metric>.system.txt and <dir>/<metric>.user.txt
  // (lowercase metric names); missing files keep the builtin template.
  static MetricCatalog load(const std::filesystem::path& dir);

  const MetricSpec& spec(JudgeMetric metric) const;

 private:
  std::array<MetricSpec, 6> specs_;
};

struct JudgeVerdict {
  JudgeMetric metric = JudgeMetric::Accuracy;
  std::string category;
  int score = 0;  // one of {0, 30, 60, 90}; meaningless when unparseable
  std::string judge_model;
  std::string raw_output;

  bool parseable() const { return category != kUnparseable; }
};

// Last substring of the form [[X]] with X in category_set, case-insensitive,
// canonicalized to the catalog spelling. Throws ParseError when no valid
// token exists. Few-shot exemplars earlier in a reply are skipped because
// the model's own verdict comes last.
std::string parse_category(const std::string& text,
                           const std::vector<std::string>& category_set);

// One temperature-0 completion against the metric's prompt; the reply is
// parsed and rank-mapped. Parse failures retry (bypassing the cache) up to
// parse_retries extra attempts, then yield an UNPARSEABLE verdict. For
// Notice/Click the {products} slot takes the injected ad's rendered
// description, or "none detected". Each call is appended to *trace as a
// judge-stage record when trace is non-null.
JudgeVerdict judge(const std::string& question, const AdInjectedResponse& response,
                   JudgeMetric metric, const std::string& judge_model, Gateway& gateway,
                   const MetricCatalog& catalog, const std::string& products_text,
                   int parse_retries = 2, PipelineTrace* trace = nullptr);

// Mean of parseable verdict scores; throws when none is parseable.
double qualitative_overall(const std::vector<JudgeVerdict>& verdicts);

// Aggregated form: mean of per-metric values (used for dataset-level rows).
double qualitative_overall(const std::vector<double>& metric_values);

}  // namespace gem
