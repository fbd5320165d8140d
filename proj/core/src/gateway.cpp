#include "gem/gateway.hpp"

#include "gem/digest.hpp"
#include "gem/errors.hpp"

#include <cmath>
#include <fstream>
#include <thread>

namespace gem {

namespace {

using nlohmann::json;

void normalize_in_place(Vec& v) {
  double norm = vec_norm(v);
  if (norm <= 0.0 || !std::isfinite(norm)) {
    throw BackendError("embedding backend returned a zero or non-finite vector");
  }
  for (auto& x : v) x /= norm;
}

// RAII slot of the gateway's bounded in-flight budget.
class FlightSlot {
 public:
  FlightSlot(std::mutex& mu, std::condition_variable& cv, int& in_flight, int limit)
      : mu_(mu), cv_(cv), in_flight_(in_flight) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < limit; });
    ++in_flight_;
  }
  ~FlightSlot() {
    {
      std::lock_guard lock(mu_);
      --in_flight_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex& mu_;
  std::condition_variable& cv_;
  int& in_flight_;
};

}  // namespace

std::string to_string(Role role) {
  switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

std::string chat_request_digest(const ChatRequest& request) {
  std::string canon;
  for (const auto& m : request.messages) {
    canon += to_string(m.role);
    canon.push_back('\x1f');
    canon += m.content;
    canon.push_back('\x1e');
  }
  if (request.max_output_tokens) {
    canon += "max=" + std::to_string(*request.max_output_tokens);
  }
  return hex_digest(canon);
}

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewayConfig cfg)
    : backend_(std::move(backend)), cfg_(std::move(cfg)) {
  if (!backend_) throw PreconditionError("gateway requires a backend");
  if (cfg_.retry_limit < 1) throw PreconditionError("retry limit must be >= 1");
  if (cfg_.concurrency_limit < 1) throw PreconditionError("concurrency limit must be >= 1");
  if (cfg_.cache_enabled && !cfg_.cache_dir.empty()) {
    std::filesystem::create_directories(cfg_.cache_dir);
    cache_file_ = cfg_.cache_dir / ("gateway-cache-" + hex_digest(backend_->id()) + ".jsonl");
    load_disk_cache();
  }
}

void Gateway::load_disk_cache() {
  std::ifstream in(cache_file_);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json entry = json::parse(line, nullptr, false);
    if (entry.is_discarded() || !entry.contains("key") || !entry.contains("value")) continue;
    cache_[entry["key"].get<std::string>()] = entry["value"];
  }
}

std::optional<json> Gateway::cache_lookup(const std::string& key) {
  std::lock_guard lock(mu_);
  auto it = cache_.find(key);
  if (it == cache_.end()) return std::nullopt;
  ++cache_hits_;
  return it->second;
}

void Gateway::cache_store(const std::string& key, const json& value) {
  std::lock_guard lock(mu_);
  cache_[key] = value;
  if (!cache_file_.empty()) {
    std::ofstream out(cache_file_, std::ios::app);
    out << json{{"key", key}, {"value", value}}.dump() << '\n';
  }
}

template <typename Fn>
auto Gateway::with_retry(Fn&& fn) -> decltype(fn()) {
  for (int attempt = 1;; ++attempt) {
    try {
      FlightSlot slot(mu_, slot_available_, in_flight_, cfg_.concurrency_limit);
      {
        std::lock_guard lock(mu_);
        ++backend_calls_;
      }
      return fn();
    } catch (const BackendError& e) {
      if (!e.retryable() || attempt >= cfg_.retry_limit) throw;
      auto delay = cfg_.backoff_base * (1L << (attempt - 1));
      std::this_thread::sleep_for(delay);
    }
  }
}

ChatResult Gateway::complete(const ChatRequest& request, CachePolicy policy) {
  if (request.messages.empty()) {
    throw PreconditionError("chat request must carry at least one message");
  }
  if (request.temperature != 0.0) {
    throw PreconditionError("chat temperature is pinned to 0.0");
  }
  const std::string key = backend_->id() + "|chat|" + request.model_id + "|" +
                          chat_request_digest(request) + "|t=0";
  if (cfg_.cache_enabled && policy == CachePolicy::use) {
    if (auto hit = cache_lookup(key)) {
      ChatResult r;
      r.text = (*hit)["text"].get<std::string>();
      r.prompt_tokens = (*hit)["prompt_tokens"].get<long>();
      r.completion_tokens = (*hit)["completion_tokens"].get<long>();
      r.model_id = (*hit)["model_id"].get<std::string>();
      return r;
    }
  }
  ChatResult result = with_retry([&] { return backend_->complete(request); });
  if (cfg_.cache_enabled) {
    cache_store(key, json{{"text", result.text},
                          {"prompt_tokens", result.prompt_tokens},
                          {"completion_tokens", result.completion_tokens},
                          {"model_id", result.model_id}});
  }
  return result;
}

EmbeddingResult Gateway::embed_batch(const std::vector<std::string>& texts,
                                     const std::string& model_id, CachePolicy policy) {
  if (texts.empty()) throw PreconditionError("embed_batch requires at least one text");
  for (const auto& t : texts) {
    if (t.empty()) throw PreconditionError("embed_batch texts must be non-empty");
  }

  EmbeddingResult result;
  result.model_id = model_id;
  result.vectors.resize(texts.size());

  std::vector<std::size_t> misses;
  std::vector<std::string> keys(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    keys[i] = backend_->id() + "|embed|" + model_id + "|" + hex_digest(texts[i]);
    if (cfg_.cache_enabled && policy == CachePolicy::use) {
      if (auto hit = cache_lookup(keys[i])) {
        result.vectors[i] = hit->get<Vec>();
        continue;
      }
    }
    misses.push_back(i);
  }

  if (!misses.empty()) {
    std::vector<std::string> miss_texts;
    miss_texts.reserve(misses.size());
    for (auto i : misses) miss_texts.push_back(texts[i]);
    EmbeddingResult fresh =
        with_retry([&] { return backend_->embed(model_id, miss_texts); });
    if (fresh.vectors.size() != miss_texts.size()) {
      throw BackendError("embedding backend returned a mismatched vector count");
    }
    for (std::size_t k = 0; k < misses.size(); ++k) {
      normalize_in_place(fresh.vectors[k]);
      result.vectors[misses[k]] = fresh.vectors[k];
      if (cfg_.cache_enabled) cache_store(keys[misses[k]], json(fresh.vectors[k]));
    }
  }
  return result;
}

long Gateway::cache_hits() const {
  std::lock_guard lock(mu_);
  return cache_hits_;
}

long Gateway::backend_calls() const {
  std::lock_guard lock(mu_);
  return backend_calls_;
}

}  // namespace gem
