#pragma once

#include "gem/gateway.hpp"
#include "gem/index.hpp"
#include "gem/injection.hpp"
#include "gem/model.hpp"
#include "gem/prompts.hpp"

#include <string>

namespace gem {

struct SolutionConfig {
  Solution solution = Solution::GiR;
  std::string base_model = "stub-base";
  std::string embed_model = "stub-embed";
  int t = 5;  // retrieval depth
  int k = 1;  // ads to inject
  DatasetMode dataset_mode = DatasetMode::chatbot;
  std::string ad_sentence_template = kDefaultAdSentenceTemplate;
};

// Retrieval basis implied by the solution: GIR-P retrieves on the user
// prompt, GI-R and GIR-R on the generated response.
RetrievalBasis basis_for(Solution solution);

struct PipelineFlags {
  bool rewrite_fallback = false;     // rewrite dropped the ad URL, pre-rewrite text kept
  bool llm_choice_fallback = false;  // topic/product choice fell back to similarity
  bool empty_retrieval = false;      // no candidates, ad-free response returned
  bool single_sentence_append = false;
  // an ad sits at a response boundary, so ad_flow substituted the response
  // mean for the missing neighbor
  bool boundary_ad = false;

  bool operator==(const PipelineFlags&) const = default;
};

struct PipelineRun {
  AdInjectedResponse response;
  PipelineTrace trace;
  std::string generator_text;  // ad-free generate-stage output (empty for Ad-Chat)
  PipelineFlags flags;
};

// Response-Generator agent: one temperature-0 completion with the mode's
// system prompt; the result is segmented and sentence-embedded. An empty
// completion is retried once, then surfaced as a backend error.
SegmentedText generate_response(const Query& query, const SolutionConfig& cfg,
                                Gateway& gateway, PipelineTrace& trace,
                                const PromptSet& prompts = PromptSet::builtin());

// generate -> retrieve (basis per variant) -> inject k ads -> rewrite (GIR
// variants only). GI-R returns the spliced text verbatim.
PipelineRun run_adllm(const Query& query, const SolutionConfig& cfg, const AdIndex& index,
                      Gateway& gateway, const PromptSet& prompts = PromptSet::builtin());

// Response-Rewriter agent. The injected ad's URL must survive the rewrite
// verbatim; otherwise the pre-rewrite response is kept and the fallback flag
// is set. Ad sentences are re-identified by URL match after the rewrite.
AdInjectedResponse rewrite_response(const AdInjectedResponse& injected, const Query& query,
                                    const SolutionConfig& cfg, const AdIndex& index,
                                    Gateway& gateway, PipelineTrace& trace,
                                    PipelineFlags& flags,
                                    const PromptSet& prompts = PromptSet::builtin());

// Baseline three-call chain: topic assignment over the database's topic
// list, product selection within that topic, then generation with the ad
// embedded in a persuasive system prompt. Ad sentences are detected post
// hoc, so injection may be absent when the model omits the URL.
PipelineRun run_adchat(const Query& query, const SolutionConfig& cfg, const AdIndex& index,
                       Gateway& gateway, const PromptSet& prompts = PromptSet::builtin());

// Dispatches on cfg.solution.
PipelineRun run_solution(const Query& query, const SolutionConfig& cfg, const AdIndex& index,
                         Gateway& gateway, const PromptSet& prompts = PromptSet::builtin());

}  // namespace gem
