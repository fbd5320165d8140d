#include "gem/judge.hpp"

#include "gem/errors.hpp"
#include "gem/judge_prompts.hpp"

#include <algorithm>
#include <cctype>

namespace gem {

namespace {

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::vector<std::string> categories_for(JudgeMetric metric) {
  switch (metric) {
    case JudgeMetric::Accuracy:
      return {"EXCELLENT", "GOOD", "FAIR", "POOR"};
    case JudgeMetric::Naturalness:
      return {"SEAMLESS", "SLIGHTLY_DISRUPTIVE", "MODERATELY_DISRUPTIVE", "HIGHLY_DISRUPTIVE"};
    case JudgeMetric::Personality:
      return {"EXEMPLARY", "SATISFACTORY", "NEEDS_IMPROVEMENT", "UNACCEPTABLE"};
    case JudgeMetric::Trust:
      return {"HIGHLY_CREDIBLE", "CREDIBLE", "SOMEWHAT_CREDIBLE", "NOT_CREDIBLE"};
    case JudgeMetric::Notice:
      return {"NOTICEABLE_POSITIVE", "NOTICEABLE_NEUTRAL", "NOTICEABLE_NEGATIVE",
              "NOT_NOTICEABLE"};
    case JudgeMetric::Click:
      return {"NOTICEABLE_CLICKED", "NOTICEABLE_NOT_CLICKED", "BARELY_NOTICEABLE",
              "NOT_NOTICEABLE"};
  }
  return {};
}

std::string read_file_if_exists(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return {};
  std::string content;
  if (FILE* f = std::fopen(path.c_str(), "rb")) {
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) content.append(buf, n);
    std::fclose(f);
  }
  return content;
}

std::string metric_file_stem(JudgeMetric metric) {
  std::string name = to_string(metric);
  for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return name;
}

}  // namespace

std::string to_string(JudgeMetric metric) {
  switch (metric) {
    case JudgeMetric::Accuracy: return "Accuracy";
    case JudgeMetric::Naturalness: return "Naturalness";
    case JudgeMetric::Personality: return "Personality";
    case JudgeMetric::Trust: return "Trust";
    case JudgeMetric::Notice: return "Notice";
    case JudgeMetric::Click: return "Click";
  }
  return "Accuracy";
}

JudgeMetric judge_metric_from_string(const std::string& s) {
  for (auto m : kAllJudgeMetrics) {
    if (to_string(m) == s) return m;
  }
  throw DataError("unknown judge metric \"" + s + "\"");
}

int score_for_rank(std::size_t rank) {
  static constexpr int kScores[4] = {90, 60, 30, 0};
  if (rank >= 4) throw PreconditionError("score_for_rank: rank out of range");
  return kScores[rank];
}

MetricCatalog MetricCatalog::builtin() {
  MetricCatalog catalog;
  std::size_t i = 0;
  for (auto m : kAllJudgeMetrics) {
    MetricSpec spec;
    spec.metric = m;
    spec.categories = categories_for(m);
    spec.system_template = builtin_system_template(m);
    spec.user_template = builtin_user_template(m);
    catalog.specs_[i++] = std::move(spec);
  }
  return catalog;
}

MetricCatalog MetricCatalog::load(const std::filesystem::path& dir) {
  MetricCatalog catalog = builtin();
  for (auto& spec : catalog.specs_) {
    std::string stem = metric_file_stem(spec.metric);
    if (std::string sys = read_file_if_exists(dir / (stem + ".system.txt")); !sys.empty()) {
      spec.system_template = std::move(sys);
    }
    if (std::string usr = read_file_if_exists(dir / (stem + ".user.txt")); !usr.empty()) {
      spec.user_template = std::move(usr);
    }
    if (spec.user_template.find("{question}") == std::string::npos ||
        spec.user_template.find("{response}") == std::string::npos) {
      throw DataError("judge template for " + to_string(spec.metric) +
                      " lacks {question}/{response} placeholders");
    }
    if ((spec.metric == JudgeMetric::Notice || spec.metric == JudgeMetric::Click) &&
        spec.user_template.find("{products}") == std::string::npos) {
      throw DataError("judge template for " + to_string(spec.metric) +
                      " lacks the {products} placeholder");
    }
  }
  return catalog;
}

const MetricSpec& MetricCatalog::spec(JudgeMetric metric) const {
  return specs_[static_cast<std::size_t>(metric)];
}

std::string parse_category(const std::string& text,
                           const std::vector<std::string>& category_set) {
  if (category_set.empty()) throw PreconditionError("parse_category: empty category set");
  std::optional<std::string> last;
  std::size_t pos = 0;
  while ((pos = text.find("[[", pos)) != std::string::npos) {
    std::size_t end = text.find("]]", pos + 2);
    if (end == std::string::npos) break;
    std::string token = text.substr(pos + 2, end - pos - 2);
    for (const auto& cat : category_set) {
      if (iequals(token, cat)) {
        last = cat;  // canonical spelling
        break;
      }
    }
    pos = end + 2;
  }
  if (!last) throw ParseError("no valid category token in judge reply");
  return *last;
}

JudgeVerdict judge(const std::string& question, const AdInjectedResponse& response,
                   JudgeMetric metric, const std::string& judge_model, Gateway& gateway,
                   const MetricCatalog& catalog, const std::string& products_text,
                   int parse_retries, PipelineTrace* trace) {
  const MetricSpec& spec = catalog.spec(metric);

  std::string user = spec.user_template;
  replace_all(user, "{question}", question);
  replace_all(user, "{response}", response.text);
  replace_all(user, "{products}", products_text.empty() ? "none detected" : products_text);

  ChatRequest request;
  request.model_id = judge_model;
  request.messages = {{Role::system, spec.system_template}, {Role::user, user}};

  JudgeVerdict verdict;
  verdict.metric = metric;
  verdict.judge_model = judge_model;

  for (int attempt = 0; attempt <= parse_retries; ++attempt) {
    ChatResult result = gateway.complete(
        request, attempt == 0 ? CachePolicy::use : CachePolicy::bypass);
    if (trace) {
      trace->calls.push_back({Stage::judge, judge_model, result.prompt_tokens,
                              result.completion_tokens, 0});
    }
    verdict.raw_output = result.text;
    try {
      verdict.category = parse_category(result.text, spec.categories);
      auto it = std::find(spec.categories.begin(), spec.categories.end(), verdict.category);
      verdict.score = score_for_rank(
          static_cast<std::size_t>(std::distance(spec.categories.begin(), it)));
      return verdict;
    } catch (const ParseError&) {
      // retry bypasses the cache; a deterministic backend will keep failing
      // and fall through to UNPARSEABLE
    }
  }
  verdict.category = kUnparseable;
  verdict.score = 0;
  return verdict;
}

double qualitative_overall(const std::vector<JudgeVerdict>& verdicts) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : verdicts) {
    if (!v.parseable()) continue;
    sum += v.score;
    ++n;
  }
  if (n == 0) throw PreconditionError("qualitative_overall: no parseable verdict");
  return sum / static_cast<double>(n);
}

double qualitative_overall(const std::vector<double>& metric_values) {
  if (metric_values.empty()) {
    throw PreconditionError("qualitative_overall: no metric values");
  }
  double sum = 0.0;
  for (double v : metric_values) sum += v;
  return sum / static_cast<double>(metric_values.size());
}

}  // namespace gem
