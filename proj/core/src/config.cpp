#include "gem/config.hpp"

#include "gem/errors.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace gem {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string parse_quoted(const std::string& value, int line_no) {
  std::string out;
  for (std::size_t i = 1; i < value.size(); ++i) {
    char c = value[i];
    if (c == '\\' && i + 1 < value.size()) {
      char next = value[++i];
      switch (next) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default:
          throw DataError("config line " + std::to_string(line_no) + ": bad escape");
      }
    } else if (c == '"') {
      return out;
    } else {
      out.push_back(c);
    }
  }
  throw DataError("config line " + std::to_string(line_no) + ": unterminated string");
}

// strips a trailing comment that is outside quotes
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (c == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

}  // namespace

TomlTable TomlTable::parse(const std::string& text) {
  TomlTable table;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw DataError("config line " + std::to_string(line_no) + ": malformed section");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw DataError("config line " + std::to_string(line_no) + ": empty key or value");
    }
    std::string full_key = section.empty() ? key : section + "." + key;

    if (value.front() == '"') {
      table.raw_[full_key] = {'s', parse_quoted(value, line_no)};
    } else if (value == "true" || value == "false") {
      table.raw_[full_key] = {'b', value};
    } else if (value.find('.') != std::string::npos || value.find('e') != std::string::npos ||
               value.find('E') != std::string::npos) {
      std::size_t consumed = 0;
      try {
        std::stod(value, &consumed);
      } catch (...) {
        consumed = 0;
      }
      if (consumed != value.size()) {
        throw DataError("config line " + std::to_string(line_no) + ": bad number");
      }
      table.raw_[full_key] = {'f', value};
    } else {
      std::size_t consumed = 0;
      try {
        std::stol(value, &consumed);
      } catch (...) {
        consumed = 0;
      }
      if (consumed != value.size()) {
        throw DataError("config line " + std::to_string(line_no) + ": bad value");
      }
      table.raw_[full_key] = {'i', value};
    }
  }
  return table;
}

TomlTable TomlTable::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::string> TomlTable::get_string(const std::string& key) const {
  auto it = raw_.find(key);
  if (it == raw_.end()) return std::nullopt;
  return it->second.second;
}

std::optional<long> TomlTable::get_int(const std::string& key) const {
  auto it = raw_.find(key);
  if (it == raw_.end() || it->second.first != 'i') return std::nullopt;
  return std::stol(it->second.second);
}

std::optional<double> TomlTable::get_double(const std::string& key) const {
  auto it = raw_.find(key);
  if (it == raw_.end() || (it->second.first != 'f' && it->second.first != 'i')) {
    return std::nullopt;
  }
  return std::stod(it->second.second);
}

std::optional<bool> TomlTable::get_bool(const std::string& key) const {
  auto it = raw_.find(key);
  if (it == raw_.end() || it->second.first != 'b') return std::nullopt;
  return it->second.second == "true";
}

std::vector<std::string> split_csv(const std::string& value) {
  std::vector<std::string> out;
  std::string current;
  for (char c : value) {
    if (c == ',') {
      current = trim(current);
      if (!current.empty()) out.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  current = trim(current);
  if (!current.empty()) out.push_back(current);
  return out;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  RunConfig cfg;
  std::error_code ec;
  if (!path.empty() && std::filesystem::exists(path, ec)) {
    cfg.apply(TomlTable::parse_file(path));
  }
  return cfg;
}

void RunConfig::apply(const TomlTable& toml) {
  auto set_str = [&](const char* key, std::string& out) {
    if (auto v = toml.get_string(key)) out = *v;
  };
  auto set_int = [&](const char* key, int& out) {
    if (auto v = toml.get_int(key)) out = static_cast<int>(*v);
  };

  set_str("backend.kind", backend);
  set_str("backend.base_url", base_url);
  set_str("backend.api_key_env", api_key_env);
  set_int("backend.retry_limit", retry_limit);
  if (auto v = toml.get_int("backend.backoff_ms")) backoff_ms = *v;
  set_int("backend.concurrency", concurrency);
  if (auto v = toml.get_string("backend.cache_dir")) cache_dir = *v;
  if (auto v = toml.get_int("backend.stub_seed")) {
    stub_seed = static_cast<std::uint64_t>(*v);
  }
  set_int("backend.stub_dimension", stub_dimension);

  set_str("models.base", base_model);
  set_str("models.embed", embed_model);
  if (auto v = toml.get_string("models.judges")) judges = split_csv(*v);

  set_int("run.t", t);
  set_int("run.k", k);
  set_int("run.runs", runs);
  set_int("run.keep", keep);
  set_int("run.workers", workers);
  if (auto v = toml.get_bool("run.cost_baseline")) cost_baseline = *v;
  set_str("run.ctr_mode", ctr_mode);
  if (auto v = toml.get_string("run.prompt_dir")) prompt_dir = *v;
}

}  // namespace gem
