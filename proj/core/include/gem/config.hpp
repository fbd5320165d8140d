#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gem {

// Minimal TOML reader covering the config surface: [section] tables with
// string / integer / float / boolean scalars and '#' comments. Keys are
// exposed as "section.key".
class TomlTable {
 public:
  static TomlTable parse(const std::string& text);
  static TomlTable parse_file(const std::filesystem::path& path);

  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<long> get_int(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;

  bool contains(const std::string& key) const { return raw_.count(key) > 0; }

 private:
  // raw scalar with a type tag: s=string i=int f=float b=bool
  std::map<std::string, std::pair<char, std::string>> raw_;
};

struct RunConfig {
  std::string backend = "stub";  // stub | http
  std::string base_url;
  std::string api_key_env = "GEM_API_KEY";
  std::string base_model = "stub-base";
  std::string embed_model = "stub-embed";
  std::vector<std::string> judges = {"stub-judge"};
  int t = 5;
  int k = 1;
  int runs = 1;
  int keep = 3;
  int workers = 4;
  int retry_limit = 3;
  long backoff_ms = 50;
  int concurrency = 4;
  std::filesystem::path cache_dir = ".gem-cache";
  std::uint64_t stub_seed = 0;
  int stub_dimension = 64;
  bool cost_baseline = false;
  std::string ctr_mode = "auto";  // auto | ground_truth | judge_click | off
  std::filesystem::path prompt_dir;

  // Defaults, overridden by the file when present. CLI flags override both.
  static RunConfig from_file(const std::filesystem::path& path);
  void apply(const TomlTable& toml);
};

std::vector<std::string> split_csv(const std::string& value);

}  // namespace gem
