#include "gem/index.hpp"

#include "gem/digest.hpp"
#include "gem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

namespace gem {

namespace {

using nlohmann::json;

std::mutex g_build_mutex;  // single-flight per build

std::string database_digest(const AdDatabase& db) {
  std::string all = db.source_label;
  for (const auto& ad : db.ads) {
    all += ad.id;
    all.push_back('\x1f');
    all += serialize_ad(ad);
    all.push_back('\x1e');
  }
  return hex_digest(all);
}

std::filesystem::path index_file(const std::filesystem::path& cache_dir,
                                 const std::string& model_id, const AdDatabase& db) {
  return cache_dir / ("adindex-" + hex_digest(model_id) + "-" + database_digest(db) + ".jsonl");
}

bool try_load_index(const std::filesystem::path& file, const AdDatabase& db,
                    const std::string& model_id, AdIndex& out) {
  std::ifstream in(file);
  if (!in) return false;
  std::vector<Vec> vectors;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json entry = json::parse(line, nullptr, false);
    if (entry.is_discarded() || !entry.contains("ad_id") || !entry.contains("vector") ||
        !entry.contains("model_id")) {
      throw DataError("stale index cache: malformed row in " + file.string());
    }
    if (row >= db.ads.size() || entry["ad_id"].get<std::string>() != db.ads[row].id ||
        entry["model_id"].get<std::string>() != model_id) {
      throw DataError("stale index cache: row mismatch in " + file.string());
    }
    vectors.push_back(entry["vector"].get<Vec>());
    if (vectors.back().size() != vectors.front().size()) {
      throw DataError("stale index cache: dimension mismatch in " + file.string());
    }
    ++row;
  }
  if (row != db.ads.size()) {
    throw DataError("stale index cache: vector count mismatch in " + file.string());
  }
  out.database = db;
  out.model_id = model_id;
  out.dimension = static_cast<int>(vectors.front().size());
  out.vectors = std::move(vectors);
  return true;
}

}  // namespace

std::string to_string(RetrievalBasis basis) {
  return basis == RetrievalBasis::prompt ? "prompt" : "response";
}

std::string serialize_ad(const Ad& ad) {
  std::ostringstream out;
  out << "name: " << ad.name << "\n"
      << "description: " << ad.description << "\n"
      << "url: " << ad.url << "\n"
      << "topic: " << ad.topic;
  if (ad.subtopic) out << "\nsubtopic: " << *ad.subtopic;
  if (ad.bid_price) {
    std::ostringstream price;
    price << *ad.bid_price;
    out << "\nbid_price: " << price.str();
  }
  return out.str();
}

double cosine(const Vec& u, const Vec& v) {
  if (u.size() != v.size()) throw PreconditionError("cosine: dimension mismatch");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw PreconditionError("cosine: zero vector");
  double value = dot / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp(value, -1.0, 1.0);
}

AdIndex build_index(const AdDatabase& db, Gateway& gateway, const std::string& embed_model,
                    const std::filesystem::path& cache_dir) {
  if (db.ads.empty()) throw PreconditionError("build_index: database is empty");
  if (auto violations = validate_database(db); !violations.empty()) {
    throw DataError("build_index: database invalid (" + violations.front().rule + " for ad \"" +
                    violations.front().ad_id + "\")");
  }

  std::lock_guard lock(g_build_mutex);

  std::filesystem::path file;
  if (!cache_dir.empty()) {
    std::filesystem::create_directories(cache_dir);
    file = index_file(cache_dir, embed_model, db);
    AdIndex cached;
    if (try_load_index(file, db, embed_model, cached)) return cached;
  }

  std::vector<std::string> texts;
  texts.reserve(db.ads.size());
  for (const auto& ad : db.ads) texts.push_back(serialize_ad(ad));
  EmbeddingResult embedded = gateway.embed_batch(texts, embed_model);

  AdIndex index;
  index.database = db;
  index.model_id = embed_model;
  index.dimension = static_cast<int>(embedded.vectors.front().size());
  index.vectors = std::move(embedded.vectors);

  if (!file.empty()) {
    std::filesystem::path tmp = file;
    tmp += ".tmp";
    {
      std::ofstream out(tmp);
      for (std::size_t i = 0; i < index.vectors.size(); ++i) {
        out << json{{"ad_id", db.ads[i].id},
                    {"model_id", embed_model},
                    {"vector", index.vectors[i]}}
                   .dump()
            << '\n';
      }
    }
    std::filesystem::rename(tmp, file);
  }
  return index;
}

RetrievalResult retrieve_top_t(const AdIndex& index, const std::string& basis_text, int t,
                               RetrievalBasis basis, Gateway& gateway) {
  if (basis_text.empty()) throw PreconditionError("retrieve_top_t: basis text is empty");
  if (t < 1) throw PreconditionError("retrieve_top_t: t must be positive");
  if (index.vectors.empty()) throw PreconditionError("retrieve_top_t: index not built");

  Vec query = gateway.embed_batch({basis_text}, index.model_id).vectors.front();

  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(index.vectors.size());
  for (std::size_t i = 0; i < index.vectors.size(); ++i) {
    scored.emplace_back(index.database.ads[i].id, cosine(query, index.vectors[i]));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (scored.size() > static_cast<std::size_t>(t)) scored.resize(static_cast<std::size_t>(t));

  RetrievalResult result;
  result.ranked = std::move(scored);
  result.basis = basis;
  result.t = t;
  return result;
}

}  // namespace gem
