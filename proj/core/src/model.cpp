#include "gem/model.hpp"

#include "gem/errors.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_set>

namespace gem {

namespace {

using nlohmann::json;

// Field accessors that surface the offending field name on schema errors.
const json& require_field(const json& j, const char* field, const char* type_name) {
  if (!j.is_object()) {
    throw DataError(std::string("expected a JSON object for ") + type_name);
  }
  auto it = j.find(field);
  if (it == j.end()) {
    throw DataError(std::string("missing required field \"") + field + "\" in " + type_name);
  }
  return *it;
}

std::string require_string(const json& j, const char* field, const char* type_name) {
  const json& v = require_field(j, field, type_name);
  if (!v.is_string()) {
    throw DataError(std::string("field \"") + field + "\" in " + type_name + " must be a string");
  }
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* field,
                                           const char* type_name) {
  auto it = j.find(field);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw DataError(std::string("field \"") + field + "\" in " + type_name + " must be a string");
  }
  return it->get<std::string>();
}

long require_count(const json& j, const char* field, const char* type_name) {
  const json& v = require_field(j, field, type_name);
  if (!v.is_number_integer() || v.get<long>() < 0) {
    throw DataError(std::string("field \"") + field + "\" in " + type_name +
                    " must be a non-negative integer");
  }
  return v.get<long>();
}

Vec vec_from_json(const json& v, const char* field, const char* type_name) {
  if (!v.is_array()) {
    throw DataError(std::string("field \"") + field + "\" in " + type_name + " must be an array");
  }
  Vec out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) {
      throw DataError(std::string("field \"") + field + "\" in " + type_name +
                      " must contain numbers only");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

const Ad* AdDatabase::find(const std::string& id) const {
  for (const auto& ad : ads) {
    if (ad.id == id) return &ad;
  }
  return nullptr;
}

std::vector<std::string> AdDatabase::topics() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& ad : ads) {
    if (seen.insert(ad.topic).second) out.push_back(ad.topic);
  }
  return out;
}

std::string to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::MtHuman: return "MT-Human";
    case DatasetKind::LmMarket: return "LM-Market";
    case DatasetKind::CaProd: return "CA-Prod";
    case DatasetKind::Custom: return "custom";
  }
  return "custom";
}

DatasetKind dataset_kind_from_string(const std::string& s) {
  if (s == "MT-Human") return DatasetKind::MtHuman;
  if (s == "LM-Market") return DatasetKind::LmMarket;
  if (s == "CA-Prod") return DatasetKind::CaProd;
  if (s == "custom") return DatasetKind::Custom;
  throw DataError("unknown dataset kind \"" + s + "\"");
}

std::string to_string(Solution s) {
  switch (s) {
    case Solution::AdChat: return "Ad-Chat";
    case Solution::GiR: return "GI-R";
    case Solution::GirR: return "GIR-R";
    case Solution::GirP: return "GIR-P";
    case Solution::Custom: return "custom";
  }
  return "custom";
}

Solution solution_from_string(const std::string& s) {
  if (s == "Ad-Chat") return Solution::AdChat;
  if (s == "GI-R") return Solution::GiR;
  if (s == "GIR-R") return Solution::GirR;
  if (s == "GIR-P") return Solution::GirP;
  if (s == "custom") return Solution::Custom;
  throw DataError("unknown solution \"" + s + "\"");
}

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::generate: return "generate";
    case Stage::topic_assign: return "topic_assign";
    case Stage::product_select: return "product_select";
    case Stage::retrieve: return "retrieve";
    case Stage::rewrite: return "rewrite";
    case Stage::judge: return "judge";
  }
  return "generate";
}

Stage stage_from_string(const std::string& s) {
  if (s == "generate") return Stage::generate;
  if (s == "topic_assign") return Stage::topic_assign;
  if (s == "product_select") return Stage::product_select;
  if (s == "retrieve") return Stage::retrieve;
  if (s == "rewrite") return Stage::rewrite;
  if (s == "judge") return Stage::judge;
  throw DataError("unknown pipeline stage \"" + s + "\"");
}

std::string to_string(DatasetMode mode) {
  return mode == DatasetMode::chatbot ? "chatbot" : "search_overview";
}

DatasetMode dataset_mode_from_string(const std::string& s) {
  if (s == "chatbot") return DatasetMode::chatbot;
  if (s == "search_overview") return DatasetMode::search_overview;
  throw DataError("unknown dataset mode \"" + s + "\"");
}

bool is_absolute_url(const std::string& url) {
  auto pos = url.find("://");
  if (pos == std::string::npos || pos == 0) return false;
  // scheme: ALPHA *(ALPHA / DIGIT / "+" / "-" / ".")
  if (!std::isalpha(static_cast<unsigned char>(url[0]))) return false;
  for (std::size_t i = 1; i < pos; ++i) {
    unsigned char c = static_cast<unsigned char>(url[i]);
    if (!std::isalnum(c) && c != '+' && c != '-' && c != '.') return false;
  }
  std::size_t host_begin = pos + 3;
  if (host_begin >= url.size()) return false;
  std::size_t host_end = url.find_first_of("/?#", host_begin);
  std::size_t host_len = (host_end == std::string::npos ? url.size() : host_end) - host_begin;
  if (host_len == 0) return false;
  for (std::size_t i = host_begin; i < host_begin + host_len; ++i) {
    if (std::isspace(static_cast<unsigned char>(url[i]))) return false;
  }
  return true;
}

double vec_norm(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<Violation> validate_database(const AdDatabase& db) {
  std::vector<Violation> report;
  std::map<std::string, int> id_counts;
  for (const auto& ad : db.ads) {
    ++id_counts[ad.id];
  }
  for (const auto& [id, count] : id_counts) {
    if (count > 1) report.push_back({id, "duplicate id"});
  }
  for (const auto& ad : db.ads) {
    if (ad.id.empty()) report.push_back({ad.id, "empty id"});
    if (!is_absolute_url(ad.url)) report.push_back({ad.id, "url does not parse as absolute"});
    if (ad.bid_price && *ad.bid_price < 0.0) report.push_back({ad.id, "negative bid_price"});
    if (ad.embedding) {
      double n = vec_norm(*ad.embedding);
      if (std::fabs(n - 1.0) > 1e-6) report.push_back({ad.id, "embedding not unit length"});
    }
  }
  return report;
}

nlohmann::json parse_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DataError("malformed JSON");
  return j;
}

// --- Ad -------------------------------------------------------------------

json to_json(const Ad& ad) {
  json j{{"id", ad.id},
         {"name", ad.name},
         {"description", ad.description},
         {"url", ad.url},
         {"topic", ad.topic}};
  if (ad.subtopic) j["subtopic"] = *ad.subtopic;
  if (ad.bid_price) j["bid_price"] = *ad.bid_price;
  if (ad.embedding) j["embedding"] = *ad.embedding;
  return j;
}

Ad ad_from_json(const json& j) {
  Ad ad;
  ad.id = require_string(j, "id", "Ad");
  ad.name = require_string(j, "name", "Ad");
  ad.description = require_string(j, "description", "Ad");
  ad.url = require_string(j, "url", "Ad");
  ad.topic = require_string(j, "topic", "Ad");
  ad.subtopic = optional_string(j, "subtopic", "Ad");
  if (auto it = j.find("bid_price"); it != j.end() && !it->is_null()) {
    if (!it->is_number()) throw DataError("field \"bid_price\" in Ad must be a number");
    ad.bid_price = it->get<double>();
  }
  if (auto it = j.find("embedding"); it != j.end() && !it->is_null()) {
    ad.embedding = vec_from_json(*it, "embedding", "Ad");
  }
  return ad;
}

// --- AdDatabase -------------------------------------------------------------

json to_json(const AdDatabase& db) {
  json ads = json::array();
  for (const auto& ad : db.ads) ads.push_back(to_json(ad));
  return json{{"ads", std::move(ads)}, {"source_label", db.source_label}};
}

AdDatabase database_from_json(const json& j) {
  AdDatabase db;
  db.source_label = require_string(j, "source_label", "AdDatabase");
  const json& ads = require_field(j, "ads", "AdDatabase");
  if (!ads.is_array()) throw DataError("field \"ads\" in AdDatabase must be an array");
  for (const auto& a : ads) db.ads.push_back(ad_from_json(a));
  return db;
}

// --- Query ------------------------------------------------------------------

json to_json(const Query& q) {
  json j{{"id", q.id}, {"text", q.text}, {"dataset", to_string(q.dataset)}};
  if (q.topic) j["topic"] = *q.topic;
  if (q.context) j["context"] = *q.context;
  if (q.relevant_ad_ids) {
    j["relevant_ad_ids"] = std::vector<std::string>(q.relevant_ad_ids->begin(),
                                                    q.relevant_ad_ids->end());
  }
  return j;
}

Query query_from_json(const json& j) {
  Query q;
  q.id = require_string(j, "id", "Query");
  q.text = require_string(j, "text", "Query");
  q.dataset = dataset_kind_from_string(require_string(j, "dataset", "Query"));
  q.topic = optional_string(j, "topic", "Query");
  q.context = optional_string(j, "context", "Query");
  if (auto it = j.find("relevant_ad_ids"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) {
      throw DataError("field \"relevant_ad_ids\" in Query must be an array");
    }
    std::set<std::string> ids;
    for (const auto& x : *it) {
      if (!x.is_string()) {
        throw DataError("field \"relevant_ad_ids\" in Query must contain strings");
      }
      ids.insert(x.get<std::string>());
    }
    q.relevant_ad_ids = std::move(ids);
  }
  if (q.text.empty()) throw DataError("field \"text\" in Query must be non-empty");
  return q;
}

// --- SegmentedText ------------------------------------------------------------

json to_json(const SegmentedText& st) {
  json sentences = json::array();
  for (const auto& s : st.sentences) {
    sentences.push_back(json{{"text", s.text}, {"start", s.start}, {"end", s.end}});
  }
  json j{{"original", st.original}, {"sentences", std::move(sentences)}};
  if (st.embeddings) j["embeddings"] = *st.embeddings;
  return j;
}

SegmentedText segmented_from_json(const json& j) {
  SegmentedText st;
  st.original = require_string(j, "original", "SegmentedText");
  const json& sentences = require_field(j, "sentences", "SegmentedText");
  if (!sentences.is_array() || sentences.empty()) {
    throw DataError("field \"sentences\" in SegmentedText must be a non-empty array");
  }
  std::size_t prev_end = 0;
  bool first = true;
  for (const auto& s : sentences) {
    Sentence sent;
    sent.text = require_string(s, "text", "Sentence");
    sent.start = static_cast<std::size_t>(require_count(s, "start", "Sentence"));
    sent.end = static_cast<std::size_t>(require_count(s, "end", "Sentence"));
    if (sent.end <= sent.start || sent.end > st.original.size()) {
      throw DataError("sentence offsets out of range in SegmentedText");
    }
    if (!first && sent.start < prev_end) {
      throw DataError("sentence offsets overlap in SegmentedText");
    }
    if (st.original.compare(sent.start, sent.end - sent.start, sent.text) != 0) {
      throw DataError("sentence text does not match its offsets in SegmentedText");
    }
    prev_end = sent.end;
    first = false;
    st.sentences.push_back(std::move(sent));
  }
  if (auto it = j.find("embeddings"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) {
      throw DataError("field \"embeddings\" in SegmentedText must be an array");
    }
    std::vector<Vec> embs;
    for (const auto& e : *it) embs.push_back(vec_from_json(e, "embeddings", "SegmentedText"));
    if (embs.size() != st.sentences.size()) {
      throw DataError("field \"embeddings\" in SegmentedText must match the sentence count");
    }
    st.embeddings = std::move(embs);
  }
  return st;
}

// --- AdInjectedResponse --------------------------------------------------------

json to_json(const AdInjectedResponse& r) {
  json j{{"text", r.text},
         {"segmented", to_json(r.segmented)},
         {"ad_sentence_indices",
          std::vector<std::size_t>(r.ad_sentence_indices.begin(), r.ad_sentence_indices.end())},
         {"solution", to_string(r.solution)}};
  if (r.injected_ad) j["injected_ad"] = *r.injected_ad;
  if (r.injection_position) j["injection_position"] = *r.injection_position;
  return j;
}

AdInjectedResponse response_from_json(const json& j) {
  AdInjectedResponse r;
  r.text = require_string(j, "text", "AdInjectedResponse");
  r.segmented = segmented_from_json(require_field(j, "segmented", "AdInjectedResponse"));
  const json& indices = require_field(j, "ad_sentence_indices", "AdInjectedResponse");
  if (!indices.is_array()) {
    throw DataError("field \"ad_sentence_indices\" in AdInjectedResponse must be an array");
  }
  for (const auto& x : indices) {
    if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<long>() >= 0)) {
      throw DataError("field \"ad_sentence_indices\" in AdInjectedResponse must hold indices");
    }
    auto idx = x.get<std::size_t>();
    if (idx >= r.segmented.size()) {
      throw DataError("ad sentence index out of range in AdInjectedResponse");
    }
    r.ad_sentence_indices.insert(idx);
  }
  r.injected_ad = optional_string(j, "injected_ad", "AdInjectedResponse");
  if (auto it = j.find("injection_position"); it != j.end() && !it->is_null()) {
    r.injection_position = it->get<std::size_t>();
  }
  r.solution = solution_from_string(require_string(j, "solution", "AdInjectedResponse"));
  if (r.injected_ad && r.ad_sentence_indices.empty()) {
    throw DataError("injected_ad set but ad_sentence_indices empty in AdInjectedResponse");
  }
  return r;
}

// --- PipelineTrace ---------------------------------------------------------------

json to_json(const PipelineTrace& t) {
  json calls = json::array();
  for (const auto& c : t.calls) {
    calls.push_back(json{{"stage", to_string(c.stage)},
                         {"model_id", c.model_id},
                         {"prompt_tokens", c.prompt_tokens},
                         {"completion_tokens", c.completion_tokens},
                         {"wall_time_ms", c.wall_time_ms}});
  }
  return json{{"calls", std::move(calls)}};
}

PipelineTrace trace_from_json(const json& j) {
  PipelineTrace t;
  const json& calls = require_field(j, "calls", "PipelineTrace");
  if (!calls.is_array()) throw DataError("field \"calls\" in PipelineTrace must be an array");
  for (const auto& c : calls) {
    CallRecord rec;
    rec.stage = stage_from_string(require_string(c, "stage", "CallRecord"));
    rec.model_id = require_string(c, "model_id", "CallRecord");
    rec.prompt_tokens = require_count(c, "prompt_tokens", "CallRecord");
    rec.completion_tokens = require_count(c, "completion_tokens", "CallRecord");
    rec.wall_time_ms = require_count(c, "wall_time_ms", "CallRecord");
    t.calls.push_back(std::move(rec));
  }
  return t;
}

}  // namespace gem
