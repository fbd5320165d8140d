#pragma once

// Test-only oracles, independent of the library implementations they check.

#include "gem/injection.hpp"
#include "gem/model.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace gem::test {

inline double oracle_cosine(const Vec& u, const Vec& v) {
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

inline Vec random_vector(std::mt19937& rng, std::size_t dim) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (auto& x : v) {
      x = dist(rng);
      norm += x * x;
    }
  } while (norm < 1e-6);
  return v;
}

inline Vec unit(Vec v) {
  double n = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  for (auto& x : v) x /= n;
  return v;
}

// A synthetic response of `n` one-word sentences with the given embeddings.
inline SegmentedText synthetic_segmented(const std::vector<Vec>& embeddings) {
  SegmentedText st;
  std::string text;
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    std::string sentence = "Sentence" + std::to_string(i) + ".";
    std::size_t start = text.size();
    text += sentence;
    st.sentences.push_back({sentence, start, text.size()});
    if (i + 1 < embeddings.size()) text += " ";
  }
  st.original = text;
  st.embeddings = embeddings;
  return st;
}

// Straight-from-formula argmin over positions x candidates with the tie
// order (psi, retrieval score desc, position, ad id).
inline std::pair<std::size_t, std::string> oracle_select(
    const SegmentedText& r, const std::vector<InjectionCandidate>& candidates) {
  const auto& embs = *r.embeddings;
  struct Entry {
    double psi;
    double score;
    std::size_t pos;
    std::string id;
  };
  std::vector<Entry> entries;
  if (r.size() == 1) {
    for (const auto& c : candidates) {
      entries.push_back({-oracle_cosine(embs[0], c.embedding), c.retrieval_score, 1, c.ad_id});
    }
  } else {
    for (std::size_t i = 1; i <= r.size() - 1; ++i) {
      for (const auto& c : candidates) {
        double p = oracle_cosine(embs[i - 1], embs[i]) -
                   (oracle_cosine(embs[i - 1], c.embedding) +
                    oracle_cosine(c.embedding, embs[i])) /
                       2.0;
        entries.push_back({p, c.retrieval_score, i, c.ad_id});
      }
    }
  }
  const Entry* best = &entries.front();
  for (const auto& e : entries) {
    if (e.psi != best->psi) {
      if (e.psi < best->psi) best = &e;
      continue;
    }
    if (e.score != best->score) {
      if (e.score > best->score) best = &e;
      continue;
    }
    if (e.pos != best->pos) {
      if (e.pos < best->pos) best = &e;
      continue;
    }
    if (e.id < best->id) best = &e;
  }
  return {best->pos, best->id};
}

}  // namespace gem::test
