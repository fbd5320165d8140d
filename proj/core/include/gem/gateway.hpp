#pragma once

#include "gem/model.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace gem {

enum class Role { system, user, assistant };

std::string to_string(Role role);

struct ChatMessage {
  Role role = Role::user;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

// Temperature is pinned to 0.0: reproducibility contract, enforced by the
// gateway as a precondition.
struct ChatRequest {
  std::string model_id;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::optional<int> max_output_tokens;
};

struct ChatResult {
  std::string text;
  long prompt_tokens = 0;
  long completion_tokens = 0;
  std::string model_id;

  bool operator==(const ChatResult&) const = default;
};

struct EmbeddingResult {
  std::vector<Vec> vectors;  // unit length, one per input text, order preserved
  std::string model_id;
};

// Uniform access to a chat-completion + embedding provider.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  // True when results are a pure function of the request (offline stub);
  // traces then record wall_time = 0 so snapshots stay byte-reproducible.
  virtual bool deterministic() const = 0;
  virtual ChatResult complete(const ChatRequest& request) = 0;
  virtual EmbeddingResult embed(const std::string& model_id,
                                const std::vector<std::string>& texts) = 0;
};

// --- Deterministic offline stub ------------------------------------------

struct StubConfig {
  std::uint64_t seed = 0;
  int dimension = 64;
  // Test hook: strip URLs from rewrite-style echoes to exercise the
  // rewriter's URL-preservation fallback.
  bool drop_urls_in_rewrite = false;
  // Canned sentence templates; {topic}/{a}/{b} placeholders. Defaults used
  // when empty.
  std::vector<std::string> sentence_templates;
};

// Offline backend whose replies are a pure function of (seed, model id,
// message digest). Understands three prompt shapes beyond plain generation:
//   - judge prompts (contain "Output: [[CATEGORY]]"): replies with one
//     category drawn from the prompt's own category set,
//   - choice prompts (contain an "Options:" list and the instruction
//     "Reply with exactly one option"): replies with one option line,
//   - rewrite prompts (system message starts a "Rewrite the response"
//     instruction): echoes the response block of the user message.
class StubBackend final : public Backend {
 public:
  explicit StubBackend(StubConfig cfg = {});

  std::string id() const override;
  bool deterministic() const override { return true; }
  ChatResult complete(const ChatRequest& request) override;
  EmbeddingResult embed(const std::string& model_id,
                        const std::vector<std::string>& texts) override;

  // The documented stub embedding construction, exposed so tests can
  // recompute it independently: for each lowercased alphanumeric word w of
  // `text`, bucket = fnv1a64(w, fnv1a64("stub-embed:<seed>")) % dimension
  // accumulates 1.0; the vector is then L2-normalized. A text with no words
  // gets a single 1.0 at bucket fnv1a64(text) % dimension.
  static Vec embed_text(const std::string& text, int dimension, std::uint64_t seed);

 private:
  StubConfig cfg_;
};

// --- OpenAI-compatible HTTP backend ---------------------------------------

struct HttpBackendConfig {
  std::string base_url;  // e.g. "https://api.example.com/v1"
  std::string api_key;   // sent as "Authorization: Bearer <key>" when set
  std::string id_label = "http";
  int connect_timeout_s = 10;
  int read_timeout_s = 120;
};

class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig cfg);

  std::string id() const override;
  bool deterministic() const override { return false; }
  ChatResult complete(const ChatRequest& request) override;
  EmbeddingResult embed(const std::string& model_id,
                        const std::vector<std::string>& texts) override;

 private:
  HttpBackendConfig cfg_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

// --- Gateway ----------------------------------------------------------------

struct GatewayConfig {
  int retry_limit = 3;  // total attempts per call
  std::chrono::milliseconds backoff_base{50};
  int concurrency_limit = 4;            // bound on in-flight backend calls
  std::filesystem::path cache_dir;      // empty: in-memory cache only
  bool cache_enabled = true;
};

enum class CachePolicy { use, bypass };

// Adds caching, bounded retry with exponential backoff, and a concurrency
// bound on top of a Backend. Results are cached keyed by (backend id, model
// id, message digest, temperature); the disk cache is JSONL under
// cache_dir. Safe for concurrent use.
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<Backend> backend, GatewayConfig cfg = {});

  ChatResult complete(const ChatRequest& request, CachePolicy policy = CachePolicy::use);
  EmbeddingResult embed_batch(const std::vector<std::string>& texts,
                              const std::string& model_id,
                              CachePolicy policy = CachePolicy::use);

  std::string backend_id() const { return backend_->id(); }
  bool deterministic() const { return backend_->deterministic(); }

  long cache_hits() const;
  long backend_calls() const;

 private:
  struct CacheEntry;

  std::optional<nlohmann::json> cache_lookup(const std::string& key);
  void cache_store(const std::string& key, const nlohmann::json& value);
  void load_disk_cache();

  template <typename Fn>
  auto with_retry(Fn&& fn) -> decltype(fn());

  std::shared_ptr<Backend> backend_;
  GatewayConfig cfg_;

  mutable std::mutex mu_;
  std::condition_variable slot_available_;
  int in_flight_ = 0;
  long cache_hits_ = 0;
  long backend_calls_ = 0;
  std::unordered_map<std::string, nlohmann::json> cache_;
  std::filesystem::path cache_file_;
};

// Canonical digest of a chat request (roles + contents + max tokens), used
// for cache keys and by the stub backend.
std::string chat_request_digest(const ChatRequest& request);

}  // namespace gem
