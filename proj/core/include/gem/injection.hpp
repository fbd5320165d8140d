#pragma once

#include "gem/model.hpp"

#include <string>
#include <vector>

namespace gem {

// One retrieved ad prepared for injection: the rendered ad sentence and its
// embedding (same model as the response sentences), plus the retrieval
// similarity used as a tie-breaker.
struct InjectionCandidate {
  std::string ad_id;
  std::string sentence;
  Vec embedding;
  double retrieval_score = 0.0;
};

struct CandidateInjection {
  std::size_t position = 1;  // 1-based: ad placed after this sentence
  std::string ad_id;
  std::string ad_sentence;
  Vec ad_embedding;
  double psi = 0.0;
};

// Flow disturbance of inserting an ad with embedding ad_vec after sentence i
// (1-based, i in [1, len-1]):
//   cos(s_i, s_{i+1}) - (cos(s_i, ad) + cos(ad, s_{i+1})) / 2
double psi(const SegmentedText& r, std::size_t i, const Vec& ad_vec);

// Argmin of psi over all positions x candidates. Ties break by lower psi,
// then higher retrieval similarity, then lower position, then ascending ad
// id. Single-sentence responses take the append path: the ad goes after the
// only sentence and psi is recorded as -cos(s_1, ad).
CandidateInjection select_injection(const SegmentedText& r,
                                    const std::vector<InjectionCandidate>& candidates);

// Splices the ad sentence into the text after the chosen position. Non-ad
// sentences stay byte-identical; sentence embeddings are spliced alongside
// when present.
AdInjectedResponse inject(const SegmentedText& r, const CandidateInjection& choice,
                          Solution solution = Solution::Custom);

// k rounds of select + inject; each round re-selects on the updated response
// with already-used ads removed from the candidate set. Requires at least k
// candidates.
AdInjectedResponse inject_k(const SegmentedText& r, std::vector<InjectionCandidate> candidates,
                            std::size_t k, Solution solution = Solution::Custom);

// Reverses inject(): removes every annotated ad sentence together with its
// separator, recovering the pre-injection text.
std::string strip_ad_sentences(const AdInjectedResponse& response);

}  // namespace gem
