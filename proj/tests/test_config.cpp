#include "gem/config.hpp"

#include "gem/errors.hpp"

#include "doctest.h"

using namespace gem;

TEST_CASE("toml subset parses sections and scalar types") {
  auto toml = TomlTable::parse(
      "# top comment\n"
      "[backend]\n"
      "kind = \"stub\"\n"
      "stub_seed = 11\n"
      "backoff_ms = 25  # inline comment\n"
      "\n"
      "[run]\n"
      "cost_baseline = true\n"
      "threshold = 1.5\n"
      "label = \"a # not a comment\"\n");
  CHECK(*toml.get_string("backend.kind") == "stub");
  CHECK(*toml.get_int("backend.stub_seed") == 11);
  CHECK(*toml.get_int("backend.backoff_ms") == 25);
  CHECK(*toml.get_bool("run.cost_baseline") == true);
  CHECK(*toml.get_double("run.threshold") == doctest::Approx(1.5));
  CHECK(*toml.get_string("run.label") == "a # not a comment");
  CHECK_FALSE(toml.get_string("missing.key").has_value());
}

TEST_CASE("toml subset rejects malformed lines") {
  CHECK_THROWS_AS(TomlTable::parse("[unclosed\n"), DataError);
  CHECK_THROWS_AS(TomlTable::parse("key value\n"), DataError);
  CHECK_THROWS_AS(TomlTable::parse("key = \"unterminated\n"), DataError);
  CHECK_THROWS_AS(TomlTable::parse("key = 12abc\n"), DataError);
}

TEST_CASE("run config picks up overrides and keeps defaults") {
  RunConfig cfg;
  cfg.apply(TomlTable::parse(
      "[backend]\n"
      "kind = \"http\"\n"
      "base_url = \"https://api.example.com/v1\"\n"
      "retry_limit = 7\n"
      "cache_dir = \"/tmp/cache\"\n"
      "stub_dimension = 16\n"
      "[models]\n"
      "base = \"model-x\"\n"
      "judges = \"j1, j2\"\n"
      "[run]\n"
      "runs = 9\n"
      "keep = 3\n"));
  CHECK(cfg.backend == "http");
  CHECK(cfg.base_url == "https://api.example.com/v1");
  CHECK(cfg.retry_limit == 7);
  CHECK(cfg.cache_dir == std::filesystem::path("/tmp/cache"));
  CHECK(cfg.stub_dimension == 16);
  CHECK(cfg.base_model == "model-x");
  CHECK(cfg.judges == std::vector<std::string>{"j1", "j2"});
  CHECK(cfg.runs == 9);
  CHECK(cfg.keep == 3);
  // untouched defaults
  CHECK(cfg.embed_model == "stub-embed");
  CHECK(cfg.t == 5);
  CHECK(cfg.k == 1);
}

TEST_CASE("split_csv trims and drops empties") {
  CHECK(split_csv("a, b ,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_csv("one") == std::vector<std::string>{"one"});
  CHECK(split_csv(" , ,") == std::vector<std::string>{});
}
