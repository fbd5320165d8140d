#pragma once

#include "gem/model.hpp"

#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace gem {

// Quantitative metrics on the x100 reporting scale. An empty optional is the
// undefined-metric signal: the value is excluded from aggregation rather
// than zero-filled (zero-filling would silently punish short responses).
// Negative similarities are reported as-is, no clamping.

// 100 * mean cosine of adjacent sentence embeddings; undefined for fewer
// than two sentences.
std::optional<double> response_flow(const SegmentedText& r);

// 100 * mean cosine of each sentence against the mean sentence embedding;
// undefined when the mean embedding is zero.
std::optional<double> response_coherence(const SegmentedText& r);

// Per ad sentence: 100 * exp(-|cos(left, ad) - cos(ad, right)|) where
// left/right are the immediate neighbors in the final text; a missing
// boundary neighbor is substituted by the response mean embedding. Multiple
// ads are averaged. Undefined without ad sentences or embeddings.
std::optional<double> ad_flow(const AdInjectedResponse& response);

// 100 * mean over ad sentences of cosine(ad, mean of non-ad embeddings);
// undefined for all-ad or no-ad responses.
std::optional<double> ad_coherence(const AdInjectedResponse& response);

// 100 * share of responses with at least one ad sentence. Throws on an
// empty list.
double injection_rate(const std::vector<AdInjectedResponse>& responses);

enum class CtrMode { ground_truth, judge_click };

// ground_truth: 100 * share of injected responses whose injected ad is in
// the query's relevance labels. judge_click: mean Click verdict score over
// injected responses (click_scores parallel to responses). Missing
// prerequisites yield an empty optional, shown as an em-dash in reports.
std::optional<double> click_through_rate(
    const std::vector<AdInjectedResponse>& responses, const std::vector<Query>& queries,
    CtrMode mode, const std::vector<std::optional<double>>* click_scores = nullptr);

struct QuantScores {
  std::optional<double> response_flow;
  std::optional<double> response_coherence;
  std::optional<double> ad_flow;
  std::optional<double> ad_coherence;
  std::optional<double> injection_rate;
  std::optional<double> ctr;
};

// Unweighted mean of the defined metrics. Throws when none is defined.
double quantitative_overall(const QuantScores& scores);

// Ad-sentence identification for responses without pipeline annotations:
// a sentence is an ad when it contains a URL matching an AdDB url (exact or
// same-host path prefix), else when it contains an ad name
// (case-insensitive). Returns the indices plus the first matched ad id.
std::pair<std::set<std::size_t>, std::optional<std::string>> detect_ad_sentences(
    const SegmentedText& segmented, const AdDatabase& db);

}  // namespace gem
