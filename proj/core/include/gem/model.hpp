#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gem {

using Vec = std::vector<double>;

// One bidding row of the ad database: product meta-information plus an
// optional precomputed unit-length embedding of its serialized text.
struct Ad {
  std::string id;
  std::string name;
  std::string description;
  std::string url;
  std::string topic;
  std::optional<std::string> subtopic;
  std::optional<double> bid_price;
  std::optional<Vec> embedding;

  bool operator==(const Ad&) const = default;
};

struct AdDatabase {
  std::vector<Ad> ads;
  std::string source_label;

  bool operator==(const AdDatabase&) const = default;

  const Ad* find(const std::string& id) const;
  // Unique topics in first-appearance order.
  std::vector<std::string> topics() const;
};

enum class DatasetKind { MtHuman, LmMarket, CaProd, Custom };

std::string to_string(DatasetKind kind);
DatasetKind dataset_kind_from_string(const std::string& s);

struct Query {
  std::string id;
  std::string text;
  DatasetKind dataset = DatasetKind::Custom;
  std::optional<std::string> topic;
  std::optional<std::string> context;  // user profile / chat history
  std::optional<std::set<std::string>> relevant_ad_ids;

  bool operator==(const Query&) const = default;
};

// Sentence span into the original text: text == original[start, end).
struct Sentence {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Sentence&) const = default;
};

struct SegmentedText {
  std::string original;
  std::vector<Sentence> sentences;
  std::optional<std::vector<Vec>> embeddings;  // parallel to sentences

  bool operator==(const SegmentedText&) const = default;

  std::size_t size() const { return sentences.size(); }
  bool has_embeddings() const { return embeddings.has_value(); }
};

enum class Solution { AdChat, GiR, GirR, GirP, Custom };

std::string to_string(Solution s);
Solution solution_from_string(const std::string& s);

// Final delivered text plus ad annotations.
struct AdInjectedResponse {
  std::string text;
  SegmentedText segmented;
  std::set<std::size_t> ad_sentence_indices;
  std::optional<std::string> injected_ad;        // ad id
  std::optional<std::size_t> injection_position;  // 1-based: ad placed after this
                                                  // sentence of the pre-injection text
  Solution solution = Solution::Custom;

  bool operator==(const AdInjectedResponse&) const = default;

  bool has_ad() const { return !ad_sentence_indices.empty(); }
};

enum class Stage { generate, topic_assign, product_select, retrieve, rewrite, judge };

std::string to_string(Stage stage);
Stage stage_from_string(const std::string& s);

enum class DatasetMode { chatbot, search_overview };

std::string to_string(DatasetMode mode);
DatasetMode dataset_mode_from_string(const std::string& s);

struct CallRecord {
  Stage stage = Stage::generate;
  std::string model_id;
  long prompt_tokens = 0;
  long completion_tokens = 0;
  long wall_time_ms = 0;

  bool operator==(const CallRecord&) const = default;
};

struct PipelineTrace {
  std::vector<CallRecord> calls;

  bool operator==(const PipelineTrace&) const = default;
};

// --- Validation ---------------------------------------------------------

struct Violation {
  std::string ad_id;
  std::string rule;

  bool operator==(const Violation&) const = default;
};

// Violations are data, not failures: an empty report means every Ad and
// AdDatabase invariant holds.
std::vector<Violation> validate_database(const AdDatabase& db);

bool is_absolute_url(const std::string& url);
double vec_norm(const Vec& v);

// --- JSON ---------------------------------------------------------------
// from_json throws DataError naming the offending field on schema mismatch;
// parse_json throws DataError on malformed input. Round-trip is the identity
// on invariant-satisfying values.

nlohmann::json parse_json(const std::string& text);

nlohmann::json to_json(const Ad& ad);
nlohmann::json to_json(const AdDatabase& db);
nlohmann::json to_json(const Query& q);
nlohmann::json to_json(const SegmentedText& st);
nlohmann::json to_json(const AdInjectedResponse& r);
nlohmann::json to_json(const PipelineTrace& t);

Ad ad_from_json(const nlohmann::json& j);
AdDatabase database_from_json(const nlohmann::json& j);
Query query_from_json(const nlohmann::json& j);
SegmentedText segmented_from_json(const nlohmann::json& j);
AdInjectedResponse response_from_json(const nlohmann::json& j);
PipelineTrace trace_from_json(const nlohmann::json& j);

}  // namespace gem
