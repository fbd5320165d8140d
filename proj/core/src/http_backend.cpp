#include "gem/gateway.hpp"

#include "gem/errors.hpp"
#include "gem/tokenizer.hpp"

#include "httplib.h"

#include <nlohmann/json.hpp>

namespace gem {

namespace {

using nlohmann::json;

std::string role_name(Role role) {
  switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

[[noreturn]] void throw_http_error(const char* what, const httplib::Result& res) {
  if (!res) {
    throw BackendError(std::string(what) + ": transport error (" +
                           httplib::to_string(res.error()) + ")",
                       0, /*retryable=*/true);
  }
  int status = res->status;
  bool retryable = status == 429 || status >= 500;
  throw BackendError(std::string(what) + ": HTTP " + std::to_string(status) + " " + res->body,
                     status, retryable);
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
  auto pos = cfg_.base_url.find("://");
  if (pos == std::string::npos) {
    throw PreconditionError("backend base_url must be an absolute URL");
  }
  auto path_pos = cfg_.base_url.find('/', pos + 3);
  if (path_pos == std::string::npos) {
    scheme_host_port_ = cfg_.base_url;
    path_prefix_.clear();
  } else {
    scheme_host_port_ = cfg_.base_url.substr(0, path_pos);
    path_prefix_ = cfg_.base_url.substr(path_pos);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  }
}

std::string HttpBackend::id() const { return cfg_.id_label + ":" + cfg_.base_url; }

ChatResult HttpBackend::complete(const ChatRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", role_name(m.role)}, {"content", m.content}});
  }
  json body{{"model", request.model_id},
            {"messages", std::move(messages)},
            {"temperature", request.temperature}};
  if (request.max_output_tokens) body["max_tokens"] = *request.max_output_tokens;

  httplib::Client cli(scheme_host_port_);
  cli.set_connection_timeout(cfg_.connect_timeout_s);
  cli.set_read_timeout(cfg_.read_timeout_s);
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

  auto res = cli.Post(path_prefix_ + "/chat/completions", headers, body.dump(),
                      "application/json");
  if (!res || res->status != 200) throw_http_error("chat completion failed", res);

  json reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty() ||
      !reply["choices"][0].contains("message")) {
    throw BackendError("chat completion failed: malformed response body", res->status, false);
  }

  ChatResult result;
  result.text = reply["choices"][0]["message"].value("content", "");
  result.model_id = request.model_id;
  if (reply.contains("usage") && reply["usage"].contains("prompt_tokens")) {
    result.prompt_tokens = reply["usage"].value("prompt_tokens", 0L);
    result.completion_tokens = reply["usage"].value("completion_tokens", 0L);
  } else {
    // Provider omitted usage: fall back to the documented estimate.
    std::string all;
    for (const auto& m : request.messages) {
      all += m.content;
      all.push_back('\n');
    }
    result.prompt_tokens = fallback_token_count(all);
    result.completion_tokens = fallback_token_count(result.text);
  }
  return result;
}

EmbeddingResult HttpBackend::embed(const std::string& model_id,
                                   const std::vector<std::string>& texts) {
  json body{{"model", model_id}, {"input", texts}};

  httplib::Client cli(scheme_host_port_);
  cli.set_connection_timeout(cfg_.connect_timeout_s);
  cli.set_read_timeout(cfg_.read_timeout_s);
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

  auto res = cli.Post(path_prefix_ + "/embeddings", headers, body.dump(), "application/json");
  if (!res || res->status != 200) throw_http_error("embedding failed", res);

  json reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("data") || !reply["data"].is_array() ||
      reply["data"].size() != texts.size()) {
    throw BackendError("embedding failed: malformed response body", res->status, false);
  }

  EmbeddingResult result;
  result.model_id = model_id;
  result.vectors.resize(texts.size());
  for (const auto& item : reply["data"]) {
    if (!item.contains("embedding") || !item.contains("index")) {
      throw BackendError("embedding failed: malformed response body", res->status, false);
    }
    auto idx = item["index"].get<std::size_t>();
    if (idx >= texts.size()) {
      throw BackendError("embedding failed: malformed response body", res->status, false);
    }
    result.vectors[idx] = item["embedding"].get<Vec>();
  }
  return result;
}

}  // namespace gem
