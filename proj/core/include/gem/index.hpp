#pragma once

#include "gem/gateway.hpp"
#include "gem/model.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace gem {

// Offline ad index: one unit vector per ad, parallel to database order.
// Immutable after build; retrieval does an exact linear scan (fixture
// databases are small enough that exactness beats ANN here).
struct AdIndex {
  AdDatabase database;
  int dimension = 0;
  std::string model_id;
  std::vector<Vec> vectors;
};

enum class RetrievalBasis { prompt, response };

std::string to_string(RetrievalBasis basis);

struct RetrievalResult {
  std::vector<std::pair<std::string, double>> ranked;  // (ad id, score), scores non-increasing
  RetrievalBasis basis = RetrievalBasis::response;
  int t = 0;
};

// Deterministic "column name: entity value" rendering of an ad row; this is
// the text the index embeds. Optional fields are omitted when absent.
std::string serialize_ad(const Ad& ad);

// dot(u, v) / (|u| |v|), clamped to [-1, 1] against rounding. Throws on
// dimension mismatch or a zero vector.
double cosine(const Vec& u, const Vec& v);

// Embeds serialize_ad(ad) for every ad. When cache_dir is non-empty the
// index is persisted as JSONL keyed by (model id, database digest) and
// reloaded on subsequent builds without re-embedding; an inconsistent file
// signals a stale cache and throws DataError.
AdIndex build_index(const AdDatabase& db, Gateway& gateway, const std::string& embed_model,
                    const std::filesystem::path& cache_dir = {});

// Top-t ads by cosine similarity between the embedded basis text and the
// indexed ad vectors. Ties break by ascending ad id.
RetrievalResult retrieve_top_t(const AdIndex& index, const std::string& basis_text, int t,
                               RetrievalBasis basis, Gateway& gateway);

}  // namespace gem
