#include "gem/gateway.hpp"

#include "gem/digest.hpp"
#include "gem/errors.hpp"
#include "gem/tokenizer.hpp"

#include "doctest.h"
#include "httplib.h"

#include <nlohmann/json.hpp>

#include <atomic>
#include <thread>

using namespace gem;
using nlohmann::json;

namespace {

ChatRequest simple_request(const std::string& content = "hello") {
  ChatRequest r;
  r.model_id = "m1";
  r.messages = {{Role::user, content}};
  return r;
}

class ScriptedBackend : public Backend {
 public:
  int fail_times = 0;
  bool retryable = true;
  std::string reply = "scripted reply";
  std::atomic<int> calls{0};
  std::atomic<int> in_flight{0};
  std::atomic<int> max_in_flight{0};
  int delay_ms = 0;

  std::string id() const override { return "scripted"; }
  bool deterministic() const override { return true; }

  ChatResult complete(const ChatRequest& request) override {
    int now = ++in_flight;
    int seen = max_in_flight.load();
    while (now > seen && !max_in_flight.compare_exchange_weak(seen, now)) {
    }
    if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    int c = ++calls;
    --in_flight;
    if (c <= fail_times) {
      throw BackendError("scripted failure", retryable ? 429 : 400, retryable);
    }
    return {reply, 10, 5, request.model_id};
  }

  EmbeddingResult embed(const std::string& model_id,
                        const std::vector<std::string>& texts) override {
    ++calls;
    EmbeddingResult r;
    r.model_id = model_id;
    for (std::size_t i = 0; i < texts.size(); ++i) r.vectors.push_back({1.0, 0.0});
    return r;
  }
};

}  // namespace

TEST_CASE("stub completion is deterministic") {
  StubBackend stub;
  auto a = stub.complete(simple_request());
  auto b = stub.complete(simple_request());
  CHECK(a.text == b.text);
  CHECK(a.prompt_tokens == b.prompt_tokens);
  CHECK(a.completion_tokens == b.completion_tokens);
  CHECK(a.completion_tokens == fallback_token_count(a.text));
}

TEST_CASE("different stub seeds give different texts") {
  StubBackend one(StubConfig{.seed = 1});
  StubBackend two(StubConfig{.seed = 2});
  CHECK(one.complete(simple_request()).text != two.complete(simple_request()).text);
}

TEST_CASE("stub embeddings are unit length and equal for equal texts") {
  StubBackend stub;
  auto result = stub.embed("e1", {"a", "a", "some longer text here"});
  REQUIRE(result.vectors.size() == 3);
  CHECK(result.vectors[0] == result.vectors[1]);
  for (const auto& v : result.vectors) {
    CHECK(vec_norm(v) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("stub embedding matches the documented construction") {
  const std::uint64_t seed = 42;
  const int dim = 16;
  StubBackend stub(StubConfig{.seed = seed, .dimension = dim});
  auto got = stub.embed("e1", {"abc"}).vectors[0];

  // independent recomputation of the documented scheme
  Vec expect(dim, 0.0);
  std::uint64_t basis = fnv1a64("stub-embed:" + std::to_string(seed));
  expect[fnv1a64("abc", basis) % dim] += 1.0;
  double norm = vec_norm(expect);
  for (auto& x : expect) x /= norm;
  CHECK(got == expect);

  // two words, one collision-free accumulation
  auto got2 = stub.embed("e1", {"Abc abc xyz"}).vectors[0];
  Vec expect2(dim, 0.0);
  expect2[fnv1a64("abc", basis) % dim] += 2.0;
  expect2[fnv1a64("xyz", basis) % dim] += 1.0;
  norm = vec_norm(expect2);
  for (auto& x : expect2) x /= norm;
  CHECK(got2 == expect2);
}

TEST_CASE("judge-style prompts get exactly one bracketed category") {
  StubBackend stub;
  ChatRequest r;
  r.model_id = "judge";
  r.messages = {{Role::system,
                 "Categories: Good (GOOD), Bad (BAD).\nFinal format:\nOutput: [[CATEGORY]]"},
                {Role::user, "judge this"}};
  auto result = stub.complete(r);
  std::size_t first = result.text.find("[[");
  REQUIRE(first != std::string::npos);
  std::size_t second = result.text.find("[[", first + 2);
  CHECK(second == std::string::npos);
  bool good = result.text.find("[[GOOD]]") != std::string::npos;
  bool bad = result.text.find("[[BAD]]") != std::string::npos;
  CHECK((good || bad));
}

TEST_CASE("choice prompts answer with one listed option") {
  StubBackend stub;
  ChatRequest r;
  r.model_id = "m";
  r.messages = {{Role::user, "Pick.\nOptions:\n- travel\n- food\n- software\n"
                             "Reply with exactly one option, verbatim.\n\nUser message: hi"}};
  auto result = stub.complete(r);
  CHECK((result.text == "travel" || result.text == "food" || result.text == "software"));
}

TEST_CASE("gateway rejects non-zero temperature and empty messages") {
  Gateway gateway(std::make_shared<StubBackend>());
  ChatRequest r = simple_request();
  r.temperature = 0.5;
  CHECK_THROWS_AS(gateway.complete(r), PreconditionError);
  ChatRequest empty;
  empty.model_id = "m";
  CHECK_THROWS_AS(gateway.complete(empty), PreconditionError);
  CHECK_THROWS_AS(gateway.embed_batch({}, "e"), PreconditionError);
  CHECK_THROWS_AS(gateway.embed_batch({""}, "e"), PreconditionError);
}

TEST_CASE("repeated requests hit the cache with zero backend calls") {
  auto backend = std::make_shared<ScriptedBackend>();
  Gateway gateway(backend);
  auto first = gateway.complete(simple_request());
  CHECK(backend->calls == 1);
  CHECK(gateway.cache_hits() == 0);
  auto second = gateway.complete(simple_request());
  CHECK(second == first);
  CHECK(backend->calls == 1);
  CHECK(gateway.cache_hits() == 1);
}

TEST_CASE("cache transparency: enabled equals disabled for a deterministic backend") {
  GatewayConfig no_cache;
  no_cache.cache_enabled = false;
  Gateway cached(std::make_shared<StubBackend>());
  Gateway uncached(std::make_shared<StubBackend>(), no_cache);
  for (const auto& text : {"one", "two", "one"}) {
    CHECK(cached.complete(simple_request(text)) == uncached.complete(simple_request(text)));
  }
  auto a = cached.embed_batch({"x", "y", "x"}, "e");
  auto b = uncached.embed_batch({"x", "y", "x"}, "e");
  CHECK(a.vectors == b.vectors);
}

TEST_CASE("disk cache survives gateway restarts") {
  auto dir = std::filesystem::temp_directory_path() / "gem-cache-test";
  std::filesystem::remove_all(dir);
  GatewayConfig cfg;
  cfg.cache_dir = dir;
  ChatResult first;
  {
    auto backend = std::make_shared<ScriptedBackend>();
    Gateway gateway(backend, cfg);
    first = gateway.complete(simple_request());
    CHECK(backend->calls == 1);
  }
  {
    auto backend = std::make_shared<ScriptedBackend>();
    Gateway gateway(backend, cfg);
    auto again = gateway.complete(simple_request());
    CHECK(again == first);
    CHECK(backend->calls == 0);
    CHECK(gateway.cache_hits() == 1);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("bounded retry: n < limit failures then success succeeds") {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->fail_times = 2;
  GatewayConfig cfg;
  cfg.retry_limit = 3;
  cfg.backoff_base = std::chrono::milliseconds(1);
  Gateway gateway(backend, cfg);
  auto result = gateway.complete(simple_request());
  CHECK(result.text == "scripted reply");
  CHECK(backend->calls == 3);
}

TEST_CASE("bounded retry: persistent failure surfaces after exactly limit attempts") {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->fail_times = 1000;
  GatewayConfig cfg;
  cfg.retry_limit = 3;
  cfg.backoff_base = std::chrono::milliseconds(1);
  Gateway gateway(backend, cfg);
  CHECK_THROWS_AS(gateway.complete(simple_request()), BackendError);
  CHECK(backend->calls == 3);
}

TEST_CASE("non-retryable errors are not retried") {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->fail_times = 1000;
  backend->retryable = false;
  GatewayConfig cfg;
  cfg.retry_limit = 5;
  cfg.backoff_base = std::chrono::milliseconds(1);
  Gateway gateway(backend, cfg);
  CHECK_THROWS_AS(gateway.complete(simple_request()), BackendError);
  CHECK(backend->calls == 1);
}

TEST_CASE("in-flight requests are bounded by the concurrency limit") {
  auto backend = std::make_shared<ScriptedBackend>();
  backend->delay_ms = 20;
  GatewayConfig cfg;
  cfg.concurrency_limit = 2;
  cfg.cache_enabled = false;
  Gateway gateway(backend, cfg);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&gateway, i] {
      gateway.complete(simple_request("req " + std::to_string(i)));
    });
  }
  for (auto& t : threads) t.join();
  CHECK(backend->max_in_flight.load() <= 2);
  CHECK(backend->calls == 8);
}

TEST_CASE("embedding batches preserve order and split cache hits") {
  auto backend = std::make_shared<ScriptedBackend>();
  Gateway gateway(backend);
  auto first = gateway.embed_batch({"a", "b"}, "e");
  CHECK(backend->calls == 1);
  auto second = gateway.embed_batch({"b", "c", "a"}, "e");
  CHECK(backend->calls == 2);  // only "c" missed
  CHECK(second.vectors.size() == 3);
  CHECK(first.vectors[1] == second.vectors[0]);
}

// --- HTTP backend against a local server -----------------------------------

namespace {

// handlers must be registered before start(); cpp-httplib routing tables are
// not safe to mutate while the listener thread runs
struct TestServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~TestServer() {
    if (thread.joinable()) {
      server.stop();
      thread.join();
    }
  }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1"; }
};

}  // namespace

TEST_CASE("http backend parses completions and usage") {
  TestServer ts;
  std::atomic<int> hits{0};
  ts.server.Post("/v1/chat/completions", [&](const httplib::Request& req,
                                             httplib::Response& res) {
    ++hits;
    json body = json::parse(req.body);
    CHECK(body["temperature"].get<double>() == 0.0);
    CHECK(body["messages"][0]["content"] == "hello");
    res.set_content(json{{"choices", json::array({json{{"message", json{{"content",
                                                                         "hi there"}}}}})},
                         {"usage", json{{"prompt_tokens", 12}, {"completion_tokens", 34}}}}
                        .dump(),
                    "application/json");
  });
  ts.start();
  HttpBackend backend(HttpBackendConfig{.base_url = ts.base_url()});
  auto result = backend.complete(simple_request());
  CHECK(result.text == "hi there");
  CHECK(result.prompt_tokens == 12);
  CHECK(result.completion_tokens == 34);
  CHECK(hits == 1);
}

TEST_CASE("http backend falls back to estimated counts when usage is absent") {
  TestServer ts;
  ts.server.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(
        json{{"choices", json::array({json{{"message", json{{"content", "two words"}}}}})}}
            .dump(),
        "application/json");
  });
  ts.start();
  HttpBackend backend(HttpBackendConfig{.base_url = ts.base_url()});
  auto result = backend.complete(simple_request("hello"));
  CHECK(result.completion_tokens == fallback_token_count("two words"));
  CHECK(result.prompt_tokens == fallback_token_count("hello\n"));
}

TEST_CASE("4xx responses surface without retry") {
  TestServer ts;
  std::atomic<int> hits{0};
  ts.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 400;
    res.set_content("{\"error\":\"bad request\"}", "application/json");
  });
  GatewayConfig cfg;
  cfg.retry_limit = 4;
  cfg.backoff_base = std::chrono::milliseconds(1);
  ts.start();
  Gateway gateway(std::make_shared<HttpBackend>(HttpBackendConfig{.base_url = ts.base_url()}),
                  cfg);
  try {
    gateway.complete(simple_request());
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.http_status() == 400);
    CHECK(std::string(e.what()).find("bad request") != std::string::npos);
  }
  CHECK(hits == 1);
}

TEST_CASE("429 is retried until success") {
  TestServer ts;
  std::atomic<int> hits{0};
  ts.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    if (++hits <= 2) {
      res.status = 429;
      res.set_content("slow down", "text/plain");
      return;
    }
    res.set_content(
        json{{"choices", json::array({json{{"message", json{{"content", "ok"}}}}})},
             {"usage", json{{"prompt_tokens", 1}, {"completion_tokens", 1}}}}
            .dump(),
        "application/json");
  });
  GatewayConfig cfg;
  cfg.retry_limit = 5;
  cfg.backoff_base = std::chrono::milliseconds(1);
  ts.start();
  Gateway gateway(std::make_shared<HttpBackend>(HttpBackendConfig{.base_url = ts.base_url()}),
                  cfg);
  CHECK(gateway.complete(simple_request()).text == "ok");
  CHECK(hits == 3);
}

TEST_CASE("malformed response bodies are surfaced") {
  TestServer ts;
  ts.server.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("not json at all", "text/plain");
  });
  ts.start();
  HttpBackend backend(HttpBackendConfig{.base_url = ts.base_url()});
  CHECK_THROWS_WITH_AS(backend.complete(simple_request()),
                       doctest::Contains("malformed response body"), BackendError);
}

TEST_CASE("http embeddings are normalized and ordered by index") {
  TestServer ts;
  ts.server.Post("/v1/embeddings", [](const httplib::Request& req, httplib::Response& res) {
    json body = json::parse(req.body);
    CHECK(body["input"].size() == 2);
    // deliberately out of order and unnormalized
    res.set_content(json{{"data", json::array({
                                      json{{"index", 1}, {"embedding", Vec{0.0, 2.0}}},
                                      json{{"index", 0}, {"embedding", Vec{3.0, 0.0}}},
                                  })}}
                        .dump(),
                    "application/json");
  });
  ts.start();
  Gateway gateway(std::make_shared<HttpBackend>(HttpBackendConfig{.base_url = ts.base_url()}));
  auto result = gateway.embed_batch({"a", "b"}, "e");
  CHECK(result.vectors[0] == Vec{1.0, 0.0});
  CHECK(result.vectors[1] == Vec{0.0, 1.0});
}
