#include "gem/segmentation.hpp"

#include "gem/errors.hpp"

#include "doctest.h"

#include <random>

using namespace gem;

namespace {

std::vector<std::string> texts_of(const SegmentedText& st) {
  std::vector<std::string> out;
  for (const auto& s : st.sentences) out.push_back(s.text);
  return out;
}

std::string join_spaces(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += " ";
    out += parts[i];
  }
  return out;
}

}  // namespace

TEST_CASE("plain terminals split") {
  auto st = segment("Hello. World.");
  CHECK(texts_of(st) == std::vector<std::string>{"Hello.", "World."});
  CHECK(st.sentences[0].start == 0);
  CHECK(st.sentences[0].end == 6);
  CHECK(st.sentences[1].start == 7);
  CHECK(st.sentences[1].end == 13);
}

TEST_CASE("URLs never split") {
  auto st = segment("Visit https://a.b/c. Then rest.");
  REQUIRE(st.size() == 2);
  CHECK(st.sentences[0].text == "Visit https://a.b/c.");
  CHECK(st.sentences[1].text == "Then rest.");
}

TEST_CASE("markdown list items are one sentence each") {
  auto st = segment("- item one\n- item two");
  CHECK(texts_of(st) == std::vector<std::string>{"- item one", "- item two"});
}

TEST_CASE("numbered list items and headings") {
  auto st = segment("# Ideas\n1. First idea here\n2. Second idea");
  CHECK(texts_of(st) ==
        std::vector<std::string>{"# Ideas", "1. First idea here", "2. Second idea"});
}

TEST_CASE("abbreviations do not break") {
  auto st = segment("Ask Dr. Smith about it. He knows e.g. Rome.");
  REQUIRE(st.size() == 2);
  CHECK(st.sentences[0].text == "Ask Dr. Smith about it.");
}

TEST_CASE("lowercase continuation does not break") {
  auto st = segment("It was v2.0 released. the rest followed later.");
  // "released." is followed by lowercase "the": no capital, no digit -> but a
  // newline-free gap with lowercase keeps the sentence open
  CHECK(st.size() == 1);
}

TEST_CASE("markdown links stay within one sentence") {
  auto st = segment("Check out [Citymapper](https://citymapper.com) — urban transport. More.");
  REQUIRE(st.size() == 2);
  CHECK(st.sentences[0].text.find("[Citymapper](https://citymapper.com)") !=
        std::string::npos);
  for (const auto& s : st.sentences) {
    std::size_t opens = 0, closes = 0;
    for (char c : s.text) {
      if (c == '[') ++opens;
      if (c == ']') ++closes;
    }
    CHECK(opens == closes);
  }
}

TEST_CASE("fenced code block is one sentence") {
  auto st = segment("Before text.\n```\ncode(); more.\ncode2();\n```\nAfter text.");
  REQUIRE(st.size() == 3);
  CHECK(st.sentences[1].text.find("code();") != std::string::npos);
  CHECK(contains_structured_markdown(st.original));
}

TEST_CASE("table rows are one sentence each") {
  auto st = segment("| a | b |\n| 1 | 2 |");
  CHECK(st.size() == 2);
  CHECK(contains_structured_markdown(st.original));
  CHECK_FALSE(contains_structured_markdown("Plain. Prose."));
}

TEST_CASE("empty input is rejected") {
  CHECK_THROWS_AS(segment(""), PreconditionError);
  CHECK_THROWS_AS(segment("   \n \t"), PreconditionError);
}

TEST_CASE("single sentence is legal") {
  auto st = segment("Only one sentence without terminal");
  CHECK(st.size() == 1);
}

TEST_CASE("offsets are monotone and cover all non-whitespace") {
  const std::string text = "First one. Second two!  Third? \n- item\nLast line.";
  auto st = segment(text);
  std::size_t prev_end = 0;
  for (const auto& s : st.sentences) {
    CHECK(s.start >= prev_end);
    CHECK(s.end > s.start);
    CHECK(text.substr(s.start, s.end - s.start) == s.text);
    prev_end = s.end;
  }
  std::vector<bool> covered(text.size(), false);
  for (const auto& s : st.sentences) {
    for (std::size_t i = s.start; i < s.end; ++i) covered[i] = true;
  }
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!std::isspace(static_cast<unsigned char>(text[i]))) CHECK(covered[i]);
  }
}

TEST_CASE("prose idempotence: re-segmenting the joined sentences is stable") {
  std::mt19937 rng(99);
  const std::vector<std::string> words = {"alpha", "bravo", "charlie", "delta",
                                          "echo",  "fox",   "golf"};
  for (int iter = 0; iter < 40; ++iter) {
    std::vector<std::string> sentences;
    std::size_t n = 1 + rng() % 5;
    for (std::size_t s = 0; s < n; ++s) {
      std::string sentence = "Word";
      std::size_t len = 1 + rng() % 6;
      for (std::size_t w = 0; w < len; ++w) sentence += " " + words[rng() % words.size()];
      sentence += ".";
      sentences.push_back(sentence);
    }
    auto first = segment(join_spaces(sentences));
    CHECK(texts_of(first) == sentences);
    auto second = segment(join_spaces(texts_of(first)));
    CHECK(texts_of(second) == texts_of(first));
  }
}

TEST_CASE("determinism") {
  const std::string text = "One two. Three four! Five?";
  CHECK(segment(text) == segment(text));
}
