#include "gem/dataset.hpp"

#include "gem/errors.hpp"

#include <fstream>
#include <sstream>

namespace gem {

namespace {

using nlohmann::json;

class ViolationLog {
 public:
  void add(const std::string& file, int line, const std::string& what) {
    if (entries_.size() < kMax) {
      std::ostringstream msg;
      msg << file;
      if (line > 0) msg << ":" << line;
      msg << ": " << what;
      entries_.push_back(msg.str());
    }
    ++total_;
  }

  void add(const std::string& file, const std::string& what) { add(file, 0, what); }

  bool full() const { return entries_.size() >= kMax; }
  bool empty() const { return total_ == 0; }

  [[noreturn]] void raise() const {
    std::ostringstream msg;
    msg << "dataset invalid (" << total_ << " violation" << (total_ == 1 ? "" : "s") << "):";
    for (const auto& e : entries_) msg << "\n  " << e;
    if (total_ > static_cast<long>(entries_.size())) msg << "\n  ...";
    throw DataError(msg.str());
  }

 private:
  static constexpr std::size_t kMax = 10;
  std::vector<std::string> entries_;
  long total_ = 0;
};

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing dataset file " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

DatasetBundle load_dataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  const auto queries_path = dir / "queries.jsonl";
  const auto ads_path = dir / "ads.jsonl";

  std::ifstream manifest_in(manifest_path);
  if (!manifest_in) throw DataError("missing dataset file " + manifest_path.string());
  std::ostringstream manifest_buf;
  manifest_buf << manifest_in.rdbuf();

  DatasetBundle bundle;
  ViolationLog log;

  json manifest = json::parse(manifest_buf.str(), nullptr, false);
  if (manifest.is_discarded() || !manifest.is_object()) {
    throw DataError(manifest_path.string() + ": malformed JSON");
  }
  if (!manifest.contains("name") || !manifest["name"].is_string()) {
    throw DataError(manifest_path.string() + ": missing required field \"name\"");
  }
  if (!manifest.contains("mode") || !manifest["mode"].is_string()) {
    throw DataError(manifest_path.string() + ": missing required field \"mode\"");
  }
  bundle.name = manifest["name"].get<std::string>();
  bundle.mode = dataset_mode_from_string(manifest["mode"].get<std::string>());

  // ads.jsonl
  {
    auto lines = read_lines(ads_path);
    int line_no = 0;
    for (const auto& line : lines) {
      ++line_no;
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        log.add(ads_path.string(), line_no, "malformed JSON");
        if (log.full()) log.raise();
        continue;
      }
      try {
        bundle.addb.ads.push_back(ad_from_json(j));
      } catch (const DataError& e) {
        log.add(ads_path.string(), line_no, e.what());
        if (log.full()) log.raise();
      }
    }
    bundle.addb.source_label = bundle.name;
    for (const auto& v : validate_database(bundle.addb)) {
      log.add(ads_path.string(), "ad \"" + v.ad_id + "\": " + v.rule);
      if (log.full()) log.raise();
    }
  }

  // queries.jsonl
  {
    auto lines = read_lines(queries_path);
    int line_no = 0;
    for (const auto& line : lines) {
      ++line_no;
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        log.add(queries_path.string(), line_no, "malformed JSON");
        if (log.full()) log.raise();
        continue;
      }
      try {
        Query q = query_from_json(j);
        if (q.relevant_ad_ids) {
          for (const auto& id : *q.relevant_ad_ids) {
            if (!bundle.addb.find(id)) {
              log.add(queries_path.string(), line_no,
                      "relevant_ad_ids references unknown ad \"" + id + "\"");
            }
          }
        }
        bundle.queries.push_back(std::move(q));
      } catch (const DataError& e) {
        log.add(queries_path.string(), line_no, e.what());
      }
      if (log.full()) log.raise();
    }
  }

  if (bundle.queries.empty()) log.add(queries_path.string(), "no queries");
  if (bundle.addb.ads.empty()) log.add(ads_path.string(), "no ads");

  if (!log.empty()) log.raise();
  return bundle;
}

}  // namespace gem
