#include "gem/segmentation.hpp"

#include "gem/errors.hpp"

#include <array>
#include <cctype>
#include <string_view>
#include <unordered_set>

namespace gem {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

struct Line {
  std::size_t begin = 0;  // offset of first char
  std::size_t end = 0;    // offset past last char (excludes '\n')
};

std::vector<Line> split_lines(const std::string& text) {
  std::vector<Line> lines;
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      lines.push_back({begin, i});
      begin = i + 1;
    }
  }
  return lines;
}

std::string_view trimmed_view(const std::string& text, const Line& line) {
  std::size_t b = line.begin;
  std::size_t e = line.end;
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return std::string_view(text).substr(b, e - b);
}

bool is_blank_line(std::string_view t) { return t.empty(); }

bool is_fence_line(std::string_view t) { return t.substr(0, 3) == "```"; }

bool is_table_row(std::string_view t) { return !t.empty() && t.front() == '|'; }

bool is_heading(std::string_view t) {
  std::size_t i = 0;
  while (i < t.size() && t[i] == '#') ++i;
  return i >= 1 && i <= 6 && i < t.size() && t[i] == ' ';
}

bool is_list_item(std::string_view t) {
  if (t.size() >= 2 && (t[0] == '-' || t[0] == '*' || t[0] == '+') && t[1] == ' ') return true;
  std::size_t i = 0;
  while (i < t.size() && is_digit(t[i])) ++i;
  if (i == 0 || i >= t.size()) return false;
  if (t[i] != '.' && t[i] != ')') return false;
  return i + 1 < t.size() && t[i + 1] == ' ';
}

bool is_structural(std::string_view t) {
  return is_table_row(t) || is_heading(t) || is_list_item(t);
}

const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> kAbbrev = {
      "e.g", "i.e", "etc", "vs", "cf", "al", "dr", "mr", "mrs", "ms", "prof",
      "sr", "jr", "st", "no", "fig", "eq", "approx", "dept", "inc", "ltd",
      "co", "u.s", "u.k", "a.m", "p.m", "ph.d",
  };
  return kAbbrev;
}

// Token of [A-Za-z0-9.] ending right before `pos` (the terminal period).
std::string token_before(const std::string& text, std::size_t pos) {
  std::size_t b = pos;
  while (b > 0) {
    char c = text[b - 1];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.') {
      --b;
    } else {
      break;
    }
  }
  std::string token = text.substr(b, pos - b);
  for (auto& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return token;
}

bool suppressed_by_abbreviation(const std::string& text, std::size_t dot) {
  std::string token = token_before(text, dot);
  if (token.empty()) return false;
  bool all_digits = true;
  for (char c : token) {
    if (!is_digit(c)) {
      all_digits = false;
      break;
    }
  }
  if (all_digits) return true;  // ordinals: "ranked 1."
  if (token.size() == 1 && dot > 0 && is_upper(text[dot - 1])) {
    return true;  // name initials: "John F. Kennedy"
  }
  return abbreviations().count(token) > 0;
}

bool url_starts_at(const std::string& text, std::size_t i) {
  std::string_view rest = std::string_view(text).substr(i);
  if (rest.substr(0, 7) == "http://" || rest.substr(0, 8) == "https://") return true;
  if (rest.substr(0, 4) == "www." && (i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1])))) {
    return true;
  }
  return false;
}

void push_trimmed_span(const std::string& text, std::size_t begin, std::size_t end,
                       std::vector<Sentence>& out) {
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
  if (begin >= end) return;
  out.push_back({text.substr(begin, end - begin), begin, end});
}

// Split a prose run [begin, end) on sentence terminals. Newlines inside the
// run are soft wraps.
void split_prose(const std::string& text, std::size_t begin, std::size_t end,
                 std::vector<Sentence>& out) {
  std::size_t sent_begin = begin;
  int link_depth = 0;       // inside [ ... ]
  bool in_link_target = false;  // inside ]( ... )
  bool in_url = false;

  for (std::size_t i = begin; i < end; ++i) {
    char c = text[i];
    if (in_link_target) {
      if (c == ')') in_link_target = false;
      continue;
    }
    if (c == '[') {
      ++link_depth;
      continue;
    }
    if (c == ']') {
      if (link_depth > 0) --link_depth;
      if (i + 1 < end && text[i + 1] == '(') in_link_target = true;
      continue;
    }
    if (in_url) {
      if (is_space(c)) {
        in_url = false;
        continue;
      }
      // trailing punctuation belongs to the sentence, not the URL
      bool url_ends = (c == ')' || c == '"' || c == '\'' || c == '>');
      bool trailing_terminal = (c == '.' || c == '!' || c == '?') &&
                               (i + 1 >= end || is_space(text[i + 1]));
      if (!url_ends && !trailing_terminal) continue;
      in_url = false;  // fall through and treat c normally
    } else if (url_starts_at(text, i)) {
      in_url = true;
      continue;
    }
    if (link_depth > 0) continue;

    if (c == '.' || c == '!' || c == '?') {
      if (c == '.' && suppressed_by_abbreviation(text, i)) continue;
      // absorb closing quotes/brackets attached to the terminal
      std::size_t j = i + 1;
      while (j < end && (text[j] == '"' || text[j] == '\'' || text[j] == ')' ||
                         text[j] == ']' || text[j] == '.' || text[j] == '!' || text[j] == '?')) {
        ++j;
      }
      if (j >= end) break;  // run end closes the sentence anyway
      if (!is_space(text[j])) continue;
      std::size_t k = j;
      bool saw_newline = false;
      while (k < end && is_space(text[k])) {
        if (text[k] == '\n') saw_newline = true;
        ++k;
      }
      if (k >= end || saw_newline || is_upper(text[k]) || is_digit(text[k])) {
        push_trimmed_span(text, sent_begin, j, out);
        sent_begin = k;
        i = j - 1;
      }
    }
  }
  push_trimmed_span(text, sent_begin, end, out);
}

}  // namespace

SegmentedText segment(const std::string& text) {
  bool all_space = true;
  for (char c : text) {
    if (!is_space(c)) {
      all_space = false;
      break;
    }
  }
  if (text.empty() || all_space) {
    throw PreconditionError("segment: input text is empty");
  }

  std::vector<Sentence> sentences;
  const std::vector<Line> lines = split_lines(text);

  std::size_t i = 0;
  while (i < lines.size()) {
    std::string_view t = trimmed_view(text, lines[i]);
    if (is_blank_line(t)) {
      ++i;
      continue;
    }
    if (is_fence_line(t)) {
      std::size_t j = i + 1;
      while (j < lines.size() && !is_fence_line(trimmed_view(text, lines[j]))) ++j;
      std::size_t block_end = (j < lines.size() ? lines[j].end : lines.back().end);
      push_trimmed_span(text, lines[i].begin, block_end, sentences);
      i = (j < lines.size() ? j + 1 : lines.size());
      continue;
    }
    if (is_structural(t)) {
      push_trimmed_span(text, lines[i].begin, lines[i].end, sentences);
      ++i;
      continue;
    }
    // prose run: contiguous plain lines
    std::size_t j = i;
    while (j + 1 < lines.size()) {
      std::string_view next = trimmed_view(text, lines[j + 1]);
      if (is_blank_line(next) || is_structural(next) || is_fence_line(next)) break;
      ++j;
    }
    split_prose(text, lines[i].begin, lines[j].end, sentences);
    i = j + 1;
  }

  SegmentedText st;
  st.original = text;
  st.sentences = std::move(sentences);
  return st;
}

bool contains_structured_markdown(const std::string& text) {
  for (const Line& line : split_lines(text)) {
    std::string_view t = trimmed_view(text, line);
    if (is_fence_line(t) || is_table_row(t)) return true;
  }
  return false;
}

}  // namespace gem
