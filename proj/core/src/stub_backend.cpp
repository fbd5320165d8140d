#include "gem/gateway.hpp"

#include "gem/digest.hpp"
#include "gem/errors.hpp"
#include "gem/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace gem {

namespace {

const std::vector<std::string>& default_templates() {
  static const std::vector<std::string> kTemplates = {
      "Here is a practical overview of {topic}.",
      "Start by clarifying what you actually need from {topic}.",
      "Many people weigh {a} and {b} before deciding.",
      "A sensible next step is to compare {a} options side by side.",
      "Keep notes on {a} so you can adjust the plan over time.",
      "When in doubt, favor the simplest approach to {topic}.",
      "Small improvements around {a} tend to add up quickly.",
  };
  return kTemplates;
}

std::vector<std::string> lowercase_words(const std::string& text) {
  std::vector<std::string> words;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::string joined_contents(const ChatRequest& request) {
  std::string all;
  for (const auto& m : request.messages) {
    all += m.content;
    all.push_back('\n');
  }
  return all;
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

// Parenthesized ALL_CAPS tokens, unique, in order of appearance. Judge
// prompts list their categories this way; falls back to [[X]] tokens.
std::vector<std::string> scan_category_set(const std::string& prompt) {
  std::vector<std::string> cats;
  auto add_unique = [&cats](const std::string& c) {
    if (std::find(cats.begin(), cats.end(), c) == cats.end()) cats.push_back(c);
  };
  for (std::size_t i = 0; i + 1 < prompt.size(); ++i) {
    if (prompt[i] != '(') continue;
    std::size_t j = i + 1;
    while (j < prompt.size() &&
           (std::isupper(static_cast<unsigned char>(prompt[j])) || prompt[j] == '_')) {
      ++j;
    }
    if (j < prompt.size() && prompt[j] == ')' && j - i - 1 >= 2) {
      add_unique(prompt.substr(i + 1, j - i - 1));
    }
  }
  if (cats.empty()) {
    for (std::size_t i = 0; i + 3 < prompt.size(); ++i) {
      if (prompt[i] != '[' || prompt[i + 1] != '[') continue;
      std::size_t j = i + 2;
      while (j < prompt.size() &&
             (std::isupper(static_cast<unsigned char>(prompt[j])) || prompt[j] == '_')) {
        ++j;
      }
      if (j + 1 < prompt.size() && prompt[j] == ']' && prompt[j + 1] == ']' && j > i + 2) {
        std::string c = prompt.substr(i + 2, j - i - 2);
        if (c != "CATEGORY" && c != "VERDICT") add_unique(c);
      }
    }
  }
  return cats;
}

std::vector<std::string> scan_option_lines(const std::string& prompt) {
  std::vector<std::string> options;
  std::size_t pos = prompt.find("Options:");
  if (pos == std::string::npos) return options;
  std::istringstream in(prompt.substr(pos));
  std::string line;
  std::getline(in, line);  // "Options:" itself
  while (std::getline(in, line)) {
    if (line.rfind("- ", 0) == 0) {
      options.push_back(line.substr(2));
    } else if (!line.empty()) {
      break;
    }
  }
  return options;
}

std::string strip_urls(const std::string& text) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.compare(i, 7, "http://") == 0 || text.compare(i, 8, "https://") == 0) {
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      continue;
    }
    out.push_back(text[i]);
    ++i;
  }
  return out;
}

std::optional<std::string> first_url(const std::string& text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.compare(i, 7, "http://") == 0 || text.compare(i, 8, "https://") == 0) {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
             text[j] != ')' && text[j] != ']' && text[j] != '"') {
        ++j;
      }
      return text.substr(i, j - i);
    }
  }
  return std::nullopt;
}

}  // namespace

StubBackend::StubBackend(StubConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.dimension <= 0) throw PreconditionError("stub dimension must be positive");
}

std::string StubBackend::id() const { return "stub:" + std::to_string(cfg_.seed); }

Vec StubBackend::embed_text(const std::string& text, int dimension, std::uint64_t seed) {
  Vec v(static_cast<std::size_t>(dimension), 0.0);
  const std::uint64_t basis = fnv1a64("stub-embed:" + std::to_string(seed));
  auto words = lowercase_words(text);
  if (words.empty()) {
    v[fnv1a64(text) % static_cast<std::uint64_t>(dimension)] = 1.0;
    return v;
  }
  for (const auto& w : words) {
    v[fnv1a64(w, basis) % static_cast<std::uint64_t>(dimension)] += 1.0;
  }
  double norm = vec_norm(v);
  for (auto& x : v) x /= norm;
  return v;
}

EmbeddingResult StubBackend::embed(const std::string& model_id,
                                   const std::vector<std::string>& texts) {
  EmbeddingResult out;
  out.model_id = model_id;
  out.vectors.reserve(texts.size());
  for (const auto& t : texts) {
    out.vectors.push_back(embed_text(t, cfg_.dimension, cfg_.seed));
  }
  return out;
}

ChatResult StubBackend::complete(const ChatRequest& request) {
  const std::string digest_input = request.model_id + "\x1d" + chat_request_digest(request);
  const std::uint64_t digest = fnv1a64(digest_input);
  SplitMix64 rng(cfg_.seed ^ digest);
  const std::string prompt = joined_contents(request);

  std::string reply;

  if (prompt.find("Output: [[CATEGORY]]") != std::string::npos) {
    auto cats = scan_category_set(prompt);
    if (cats.empty()) {
      reply = "Analysis: no category set found.\nOutput: [[UNKNOWN]]";
    } else {
      reply = "Analysis: deterministic stub verdict.\nOutput: [[" +
              cats[rng.pick(cats.size())] + "]]";
    }
  } else if (prompt.find("Reply with exactly one option") != std::string::npos &&
             prompt.find("Options:") != std::string::npos) {
    auto options = scan_option_lines(prompt);
    reply = options.empty() ? std::string("none") : options[rng.pick(options.size())];
  } else if (prompt.find("Rewrite the response") != std::string::npos) {
    // The rewrite user message is one instruction paragraph, a blank line,
    // then the response to rewrite; echo that block.
    const std::string& user = request.messages.back().content;
    std::size_t pos = user.find("\n\n");
    std::string body = (pos == std::string::npos) ? user : user.substr(pos + 2);
    reply = cfg_.drop_urls_in_rewrite ? strip_urls(body) : body;
  } else {
    const auto& templates =
        cfg_.sentence_templates.empty() ? default_templates() : cfg_.sentence_templates;
    std::string user_text;
    for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
      if (it->role == Role::user) {
        user_text = it->content;
        break;
      }
    }
    auto words = lowercase_words(user_text);
    if (words.empty()) words = {"this", "question"};
    std::string topic = words.front();
    for (const auto& w : words) {
      if (w.size() > topic.size()) topic = w;
    }
    std::size_t n_sentences = 3 + rng.pick(3);
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < n_sentences; ++i) {
      std::string s = templates[rng.pick(templates.size())];
      replace_all(s, "{topic}", topic);
      replace_all(s, "{a}", words[rng.pick(words.size())]);
      replace_all(s, "{b}", words[rng.pick(words.size())]);
      parts.push_back(std::move(s));
    }
    // An ad planted in the prompt surfaces in the reply for ~3/4 of digests,
    // mirroring prompt-driven injection being uncontrollable.
    if (auto url = first_url(prompt); url && rng.pick(4) != 0) {
      parts.push_back("You can find more details at " + *url + " if that sounds helpful.");
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) reply += " ";
      reply += parts[i];
    }
  }

  ChatResult result;
  result.text = std::move(reply);
  result.model_id = request.model_id;
  result.prompt_tokens = fallback_token_count(prompt);
  result.completion_tokens = fallback_token_count(result.text);
  return result;
}

}  // namespace gem
