#include "gem/pipelines.hpp"

#include "gem/errors.hpp"
#include "gem/quant_metrics.hpp"
#include "gem/segmentation.hpp"
#include "gem/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>

namespace gem {

namespace {

std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

class CallTimer {
 public:
  explicit CallTimer(bool deterministic) : deterministic_(deterministic) {
    start_ = std::chrono::steady_clock::now();
  }
  long elapsed_ms() const {
    if (deterministic_) return 0;
    auto d = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration_cast<std::chrono::milliseconds>(d).count();
  }

 private:
  bool deterministic_;
  std::chrono::steady_clock::time_point start_;
};

ChatResult timed_complete(Gateway& gateway, const ChatRequest& request, Stage stage,
                          PipelineTrace& trace, CachePolicy policy = CachePolicy::use) {
  CallTimer timer(gateway.deterministic());
  ChatResult result = gateway.complete(request, policy);
  trace.calls.push_back(
      {stage, request.model_id, result.prompt_tokens, result.completion_tokens,
       timer.elapsed_ms()});
  return result;
}

// Embedding usage is estimated with the fallback tokenizer; providers do not
// report usage per input on the embeddings endpoint.
EmbeddingResult timed_embed(Gateway& gateway, const std::vector<std::string>& texts,
                            const std::string& model_id, PipelineTrace& trace) {
  CallTimer timer(gateway.deterministic());
  EmbeddingResult result = gateway.embed_batch(texts, model_id);
  long tokens = 0;
  for (const auto& t : texts) tokens += fallback_token_count(t);
  trace.calls.push_back({Stage::retrieve, model_id, tokens, 0, timer.elapsed_ms()});
  return result;
}

void embed_sentences(SegmentedText& seg, const std::string& model_id, Gateway& gateway,
                     PipelineTrace& trace) {
  std::vector<std::string> texts;
  texts.reserve(seg.size());
  for (const auto& s : seg.sentences) texts.push_back(s.text);
  seg.embeddings = timed_embed(gateway, texts, model_id, trace).vectors;
}

std::string user_message_for(const Query& query) {
  if (query.context && !query.context->empty()) {
    return "Context: " + *query.context + "\n\n" + query.text;
  }
  return query.text;
}

AdInjectedResponse ad_free_response(SegmentedText seg, Solution solution) {
  AdInjectedResponse r;
  r.text = seg.original;
  r.segmented = std::move(seg);
  r.solution = solution;
  return r;
}

std::optional<std::string> parse_topic_choice(const std::string& reply,
                                              const std::vector<std::string>& topics) {
  const std::string lowered = lowercase(trim(reply));
  for (const auto& t : topics) {
    if (lowered == lowercase(t)) return t;
  }
  std::optional<std::string> unique;
  for (const auto& t : topics) {
    if (lowered.find(lowercase(t)) != std::string::npos) {
      if (unique) return std::nullopt;  // ambiguous
      unique = t;
    }
  }
  return unique;
}

const Ad* parse_product_choice(const std::string& reply, const std::vector<Ad>& ads) {
  const std::string lowered = lowercase(reply);
  for (const auto& ad : ads) {
    if (lowered.find(lowercase(ad.id)) != std::string::npos) return &ad;
  }
  for (const auto& ad : ads) {
    if (ad.name.size() >= 3 && lowered.find(lowercase(ad.name)) != std::string::npos) {
      return &ad;
    }
  }
  return nullptr;
}

// Highest-similarity fallback over a set of texts against the query text.
std::size_t most_similar(Gateway& gateway, const std::string& embed_model,
                         const std::string& query_text,
                         const std::vector<std::string>& texts, PipelineTrace& trace) {
  std::vector<std::string> batch;
  batch.reserve(texts.size() + 1);
  batch.push_back(query_text);
  for (const auto& t : texts) batch.push_back(t);
  EmbeddingResult embedded = timed_embed(gateway, batch, embed_model, trace);
  std::size_t best = 0;
  double best_score = -2.0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    double score = cosine(embedded.vectors[0], embedded.vectors[i + 1]);
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

}  // namespace

RetrievalBasis basis_for(Solution solution) {
  return solution == Solution::GirP ? RetrievalBasis::prompt : RetrievalBasis::response;
}

SegmentedText generate_response(const Query& query, const SolutionConfig& cfg,
                                Gateway& gateway, PipelineTrace& trace,
                                const PromptSet& prompts) {
  if (query.text.empty()) throw PreconditionError("generate_response: empty query text");

  ChatRequest request;
  request.model_id = cfg.base_model;
  request.messages = {{Role::system, cfg.dataset_mode == DatasetMode::chatbot
                                         ? prompts.chatbot_system
                                         : prompts.search_overview_system},
                      {Role::user, user_message_for(query)}};

  ChatResult result = timed_complete(gateway, request, Stage::generate, trace);
  if (trim(result.text).empty()) {
    result = timed_complete(gateway, request, Stage::generate, trace, CachePolicy::bypass);
    if (trim(result.text).empty()) {
      throw BackendError("generator returned an empty completion twice");
    }
  }

  SegmentedText seg = segment(result.text);
  embed_sentences(seg, cfg.embed_model, gateway, trace);
  return seg;
}

PipelineRun run_adllm(const Query& query, const SolutionConfig& cfg, const AdIndex& index,
                      Gateway& gateway, const PromptSet& prompts) {
  if (cfg.solution == Solution::AdChat) {
    throw PreconditionError("run_adllm called with the Ad-Chat solution");
  }
  PipelineRun run;

  SegmentedText seg = generate_response(query, cfg, gateway, run.trace, prompts);
  run.generator_text = seg.original;

  const RetrievalBasis basis = basis_for(cfg.solution);
  const std::string basis_text =
      basis == RetrievalBasis::prompt ? query.text : seg.original;
  RetrievalResult retrieval = retrieve_top_t(index, basis_text, cfg.t, basis, gateway);
  run.trace.calls.push_back({Stage::retrieve, cfg.embed_model,
                             fallback_token_count(basis_text), 0, 0});

  if (retrieval.ranked.empty()) {
    run.flags.empty_retrieval = true;
    run.response = ad_free_response(std::move(seg), cfg.solution);
    return run;
  }

  std::vector<std::string> sentences;
  sentences.reserve(retrieval.ranked.size());
  std::vector<InjectionCandidate> candidates;
  candidates.reserve(retrieval.ranked.size());
  for (const auto& [ad_id, score] : retrieval.ranked) {
    const Ad* ad = index.database.find(ad_id);
    InjectionCandidate c;
    c.ad_id = ad_id;
    c.sentence = render_ad_sentence(*ad, cfg.ad_sentence_template);
    c.retrieval_score = score;
    candidates.push_back(std::move(c));
    sentences.push_back(candidates.back().sentence);
  }
  EmbeddingResult embedded = timed_embed(gateway, sentences, cfg.embed_model, run.trace);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    candidates[i].embedding = embedded.vectors[i];
  }

  run.flags.single_sentence_append = seg.size() == 1;
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(cfg.k),
                                              candidates.size());
  run.response = inject_k(seg, std::move(candidates), k, cfg.solution);

  if (cfg.solution == Solution::GirR || cfg.solution == Solution::GirP) {
    run.response = rewrite_response(run.response, query, cfg, index, gateway, run.trace,
                                    run.flags, prompts);
  }
  return run;
}

AdInjectedResponse rewrite_response(const AdInjectedResponse& injected, const Query& query,
                                    const SolutionConfig& cfg, const AdIndex& index,
                                    Gateway& gateway, PipelineTrace& trace,
                                    PipelineFlags& flags, const PromptSet& prompts) {
  if (!injected.has_ad()) {
    throw PreconditionError("rewrite_response: response carries no ad sentence");
  }

  ChatRequest request;
  request.model_id = cfg.base_model;
  request.messages = {{Role::system, prompts.rewrite_system},
                      {Role::user, render_rewrite_user(query.text, injected.text)}};
  ChatResult result = timed_complete(gateway, request, Stage::rewrite, trace);

  // Every injected ad's URL must survive verbatim.
  std::vector<const Ad*> injected_ads;
  if (injected.injected_ad) {
    if (const Ad* ad = index.database.find(*injected.injected_ad)) injected_ads.push_back(ad);
  }
  for (const auto& ad : index.database.ads) {
    for (auto idx : injected.ad_sentence_indices) {
      if (injected.segmented.sentences[idx].text.find(ad.url) != std::string::npos &&
          std::find(injected_ads.begin(), injected_ads.end(), &ad) == injected_ads.end()) {
        injected_ads.push_back(&ad);
      }
    }
  }

  bool urls_survive = !injected_ads.empty();
  for (const Ad* ad : injected_ads) {
    if (result.text.find(ad->url) == std::string::npos) {
      urls_survive = false;
      break;
    }
  }
  if (!urls_survive || trim(result.text).empty()) {
    flags.rewrite_fallback = true;
    return injected;
  }

  SegmentedText seg = segment(result.text);
  embed_sentences(seg, cfg.embed_model, gateway, trace);

  AdInjectedResponse rewritten;
  rewritten.text = seg.original;
  rewritten.solution = injected.solution;
  rewritten.injected_ad = injected.injected_ad;
  rewritten.injection_position = injected.injection_position;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    for (const Ad* ad : injected_ads) {
      if (seg.sentences[i].text.find(ad->url) != std::string::npos) {
        rewritten.ad_sentence_indices.insert(i);
        break;
      }
    }
  }
  rewritten.segmented = std::move(seg);
  if (rewritten.ad_sentence_indices.empty()) {
    // URL present in the text but split across sentences: keep the safe text.
    flags.rewrite_fallback = true;
    return injected;
  }
  return rewritten;
}

PipelineRun run_adchat(const Query& query, const SolutionConfig& cfg, const AdIndex& index,
                       Gateway& gateway, const PromptSet& prompts) {
  PipelineRun run;
  const AdDatabase& db = index.database;
  const std::vector<std::string> topics = db.topics();
  if (topics.empty()) throw PreconditionError("run_adchat: database carries no topics");

  // Stage 1: topic assignment
  ChatRequest topic_request;
  topic_request.model_id = cfg.base_model;
  topic_request.messages = {
      {Role::system, prompts.chatbot_system},
      {Role::user, render_topic_choice(prompts, topics, user_message_for(query))}};
  ChatResult topic_reply =
      timed_complete(gateway, topic_request, Stage::topic_assign, run.trace);
  std::optional<std::string> topic = parse_topic_choice(topic_reply.text, topics);
  if (!topic) {
    topic_reply = timed_complete(gateway, topic_request, Stage::topic_assign, run.trace,
                                 CachePolicy::bypass);
    topic = parse_topic_choice(topic_reply.text, topics);
  }
  if (!topic) {
    run.flags.llm_choice_fallback = true;
    topic = topics[most_similar(gateway, cfg.embed_model, query.text, topics, run.trace)];
  }

  std::vector<Ad> topic_ads;
  for (const auto& ad : db.ads) {
    if (ad.topic == *topic) topic_ads.push_back(ad);
  }
  if (topic_ads.empty()) topic_ads = db.ads;

  // Stage 2: product selection
  ChatRequest product_request;
  product_request.model_id = cfg.base_model;
  product_request.messages = {
      {Role::system, prompts.chatbot_system},
      {Role::user, render_product_choice(prompts, topic_ads, user_message_for(query))}};
  ChatResult product_reply =
      timed_complete(gateway, product_request, Stage::product_select, run.trace);
  const Ad* chosen = parse_product_choice(product_reply.text, topic_ads);
  if (!chosen) {
    product_reply = timed_complete(gateway, product_request, Stage::product_select,
                                   run.trace, CachePolicy::bypass);
    chosen = parse_product_choice(product_reply.text, topic_ads);
  }
  if (!chosen) {
    run.flags.llm_choice_fallback = true;
    std::vector<std::string> serialized;
    serialized.reserve(topic_ads.size());
    for (const auto& ad : topic_ads) serialized.push_back(serialize_ad(ad));
    chosen = &topic_ads[most_similar(gateway, cfg.embed_model, query.text, serialized,
                                     run.trace)];
  }

  // Stage 3: generation with the ad in the system prompt
  ChatRequest gen_request;
  gen_request.model_id = cfg.base_model;
  gen_request.messages = {{Role::system, render_adchat_system(prompts, *chosen)},
                          {Role::user, user_message_for(query)}};
  ChatResult gen_reply = timed_complete(gateway, gen_request, Stage::generate, run.trace);
  if (trim(gen_reply.text).empty()) {
    gen_reply = timed_complete(gateway, gen_request, Stage::generate, run.trace,
                               CachePolicy::bypass);
    if (trim(gen_reply.text).empty()) {
      throw BackendError("generator returned an empty completion twice");
    }
  }

  SegmentedText seg = segment(gen_reply.text);
  embed_sentences(seg, cfg.embed_model, gateway, run.trace);

  auto [indices, matched_ad] = detect_ad_sentences(seg, db);
  AdInjectedResponse response;
  response.text = seg.original;
  response.segmented = std::move(seg);
  response.ad_sentence_indices = std::move(indices);
  response.solution = Solution::AdChat;
  if (response.has_ad()) {
    bool chosen_detected = false;
    for (auto idx : response.ad_sentence_indices) {
      const std::string& s = response.segmented.sentences[idx].text;
      if (s.find(chosen->url) != std::string::npos ||
          lowercase(s).find(lowercase(chosen->name)) != std::string::npos) {
        chosen_detected = true;
        break;
      }
    }
    response.injected_ad = chosen_detected ? chosen->id : matched_ad;
  }
  run.response = std::move(response);
  return run;
}

PipelineRun run_solution(const Query& query, const SolutionConfig& cfg, const AdIndex& index,
                         Gateway& gateway, const PromptSet& prompts) {
  if (cfg.solution == Solution::AdChat) return run_adchat(query, cfg, index, gateway, prompts);
  return run_adllm(query, cfg, index, gateway, prompts);
}

}  // namespace gem
