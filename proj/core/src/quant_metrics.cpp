#include "gem/quant_metrics.hpp"

#include "gem/errors.hpp"
#include "gem/index.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace gem {

namespace {

Vec mean_of(const std::vector<Vec>& vectors, const std::vector<std::size_t>& indices) {
  Vec mean(vectors.front().size(), 0.0);
  for (auto i : indices) {
    for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += vectors[i][d];
  }
  for (auto& x : mean) x /= static_cast<double>(indices.size());
  return mean;
}

Vec mean_of_all(const std::vector<Vec>& vectors) {
  std::vector<std::size_t> all(vectors.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return mean_of(vectors, all);
}

bool is_zero(const Vec& v) { return vec_norm(v) == 0.0; }

std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// scheme stripped, host lowercased, trailing slashes dropped
std::pair<std::string, std::string> split_host_path(const std::string& url) {
  std::string rest = url;
  if (auto pos = rest.find("://"); pos != std::string::npos) rest = rest.substr(pos + 3);
  while (!rest.empty() && rest.back() == '/') rest.pop_back();
  auto slash = rest.find('/');
  std::string host = lowercase(slash == std::string::npos ? rest : rest.substr(0, slash));
  std::string path = slash == std::string::npos ? "" : rest.substr(slash);
  return {host, path};
}

std::vector<std::string> extract_urls(const std::string& text) {
  std::vector<std::string> urls;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.compare(i, 7, "http://") == 0 || text.compare(i, 8, "https://") == 0) {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
             text[j] != ')' && text[j] != ']' && text[j] != '"' && text[j] != '>') {
        ++j;
      }
      while (j > i && (text[j - 1] == '.' || text[j - 1] == ',' || text[j - 1] == ';')) --j;
      urls.push_back(text.substr(i, j - i));
      i = j;
    }
  }
  return urls;
}

bool urls_match(const std::string& a, const std::string& b) {
  auto [ha, pa] = split_host_path(a);
  auto [hb, pb] = split_host_path(b);
  if (ha != hb || ha.empty()) return false;
  return pa == pb || pa.rfind(pb, 0) == 0 || pb.rfind(pa, 0) == 0;
}

}  // namespace

std::optional<double> response_flow(const SegmentedText& r) {
  if (r.size() < 2 || !r.has_embeddings()) return std::nullopt;
  const auto& embs = *r.embeddings;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < embs.size(); ++i) {
    sum += cosine(embs[i], embs[i + 1]);
  }
  return 100.0 * sum / static_cast<double>(embs.size() - 1);
}

std::optional<double> response_coherence(const SegmentedText& r) {
  if (r.size() < 1 || !r.has_embeddings()) return std::nullopt;
  const auto& embs = *r.embeddings;
  Vec mean = mean_of_all(embs);
  if (is_zero(mean)) return std::nullopt;
  double sum = 0.0;
  for (const auto& e : embs) sum += cosine(e, mean);
  return 100.0 * sum / static_cast<double>(embs.size());
}

std::optional<double> ad_flow(const AdInjectedResponse& response) {
  const auto& seg = response.segmented;
  if (response.ad_sentence_indices.empty() || !seg.has_embeddings()) return std::nullopt;
  const auto& embs = *seg.embeddings;
  Vec mean = mean_of_all(embs);
  double sum = 0.0;
  for (auto j : response.ad_sentence_indices) {
    const Vec& left = j > 0 ? embs[j - 1] : mean;
    const Vec& right = j + 1 < embs.size() ? embs[j + 1] : mean;
    if (is_zero(left) || is_zero(right) || is_zero(embs[j])) return std::nullopt;
    double gap = std::fabs(cosine(left, embs[j]) - cosine(embs[j], right));
    sum += std::exp(-gap);
  }
  return 100.0 * sum / static_cast<double>(response.ad_sentence_indices.size());
}

std::optional<double> ad_coherence(const AdInjectedResponse& response) {
  const auto& seg = response.segmented;
  if (response.ad_sentence_indices.empty() || !seg.has_embeddings()) return std::nullopt;
  std::vector<std::size_t> non_ad;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    if (!response.ad_sentence_indices.count(i)) non_ad.push_back(i);
  }
  if (non_ad.empty()) return std::nullopt;
  Vec mean = mean_of(*seg.embeddings, non_ad);
  if (is_zero(mean)) return std::nullopt;
  double sum = 0.0;
  for (auto j : response.ad_sentence_indices) {
    sum += cosine((*seg.embeddings)[j], mean);
  }
  return 100.0 * sum / static_cast<double>(response.ad_sentence_indices.size());
}

double injection_rate(const std::vector<AdInjectedResponse>& responses) {
  if (responses.empty()) throw PreconditionError("injection_rate: empty response list");
  std::size_t injected = 0;
  for (const auto& r : responses) {
    if (r.has_ad()) ++injected;
  }
  return 100.0 * static_cast<double>(injected) / static_cast<double>(responses.size());
}

std::optional<double> click_through_rate(
    const std::vector<AdInjectedResponse>& responses, const std::vector<Query>& queries,
    CtrMode mode, const std::vector<std::optional<double>>* click_scores) {
  if (mode == CtrMode::ground_truth) {
    if (responses.size() != queries.size()) return std::nullopt;
    std::size_t injected = 0, relevant = 0;
    bool any_labels = false;
    for (std::size_t i = 0; i < responses.size(); ++i) {
      if (queries[i].relevant_ad_ids) any_labels = true;
      if (!responses[i].has_ad() || !responses[i].injected_ad) continue;
      ++injected;
      if (queries[i].relevant_ad_ids &&
          queries[i].relevant_ad_ids->count(*responses[i].injected_ad)) {
        ++relevant;
      }
    }
    if (!any_labels || injected == 0) return std::nullopt;
    return 100.0 * static_cast<double>(relevant) / static_cast<double>(injected);
  }
  // judge_click
  if (!click_scores || click_scores->size() != responses.size()) return std::nullopt;
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    if (!responses[i].has_ad() || !(*click_scores)[i]) continue;
    sum += *(*click_scores)[i];
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

double quantitative_overall(const QuantScores& scores) {
  double sum = 0.0;
  int n = 0;
  for (const auto& v : {scores.response_flow, scores.response_coherence, scores.ad_flow,
                        scores.ad_coherence, scores.injection_rate, scores.ctr}) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) throw PreconditionError("quantitative_overall: no defined metric");
  return sum / static_cast<double>(n);
}

std::pair<std::set<std::size_t>, std::optional<std::string>> detect_ad_sentences(
    const SegmentedText& segmented, const AdDatabase& db) {
  std::set<std::size_t> indices;
  std::optional<std::string> first_ad;

  for (std::size_t i = 0; i < segmented.size(); ++i) {
    const std::string& sentence = segmented.sentences[i].text;
    const std::string lowered = lowercase(sentence);
    auto urls = extract_urls(sentence);
    for (const auto& ad : db.ads) {
      bool hit = false;
      for (const auto& u : urls) {
        if (urls_match(u, ad.url)) {
          hit = true;
          break;
        }
      }
      if (!hit && ad.name.size() >= 3 &&
          lowered.find(lowercase(ad.name)) != std::string::npos) {
        hit = true;
      }
      if (hit) {
        indices.insert(i);
        if (!first_ad) first_ad = ad.id;
        break;
      }
    }
  }
  return {indices, first_ad};
}

}  // namespace gem
