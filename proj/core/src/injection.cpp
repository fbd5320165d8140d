#include "gem/injection.hpp"

#include "gem/errors.hpp"
#include "gem/index.hpp"

#include <algorithm>

namespace gem {

namespace {

// Separator for splicing at a gap: newline when the surrounding gap is
// line-structured (list items, paragraphs), else a single space.
std::string splice_separator(const std::string& text, std::size_t gap_begin,
                             std::size_t gap_end) {
  for (std::size_t i = gap_begin; i < gap_end && i < text.size(); ++i) {
    if (text[i] == '\n') return "\n";
  }
  return " ";
}

struct Pick {
  std::size_t position;
  std::size_t candidate;
  double psi_value;
};

bool better(const Pick& a, const Pick& b, const std::vector<InjectionCandidate>& cands) {
  if (a.psi_value != b.psi_value) return a.psi_value < b.psi_value;
  const auto& ca = cands[a.candidate];
  const auto& cb = cands[b.candidate];
  if (ca.retrieval_score != cb.retrieval_score) return ca.retrieval_score > cb.retrieval_score;
  if (a.position != b.position) return a.position < b.position;
  return ca.ad_id < cb.ad_id;
}

}  // namespace

double psi(const SegmentedText& r, std::size_t i, const Vec& ad_vec) {
  if (!r.has_embeddings()) throw PreconditionError("psi: response embeddings missing");
  if (r.size() < 2) throw PreconditionError("psi: response needs at least two sentences");
  if (i < 1 || i > r.size() - 1) throw PreconditionError("psi: position out of range");
  const auto& embs = *r.embeddings;
  const Vec& left = embs[i - 1];
  const Vec& right = embs[i];
  return cosine(left, right) - (cosine(left, ad_vec) + cosine(ad_vec, right)) / 2.0;
}

CandidateInjection select_injection(const SegmentedText& r,
                                    const std::vector<InjectionCandidate>& candidates) {
  if (candidates.empty()) throw PreconditionError("select_injection: empty candidate set");
  if (!r.has_embeddings()) throw PreconditionError("select_injection: embeddings missing");
  if (r.size() == 0) throw PreconditionError("select_injection: empty response");

  Pick best{0, 0, 0.0};
  bool have_best = false;

  if (r.size() == 1) {
    // Append path: the index set [len-1] is empty, so the ad goes after the
    // single sentence and the most related candidate wins.
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      Pick p{1, c, -cosine((*r.embeddings)[0], candidates[c].embedding)};
      if (!have_best || better(p, best, candidates)) {
        best = p;
        have_best = true;
      }
    }
  } else {
    for (std::size_t i = 1; i <= r.size() - 1; ++i) {
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        Pick p{i, c, psi(r, i, candidates[c].embedding)};
        if (!have_best || better(p, best, candidates)) {
          best = p;
          have_best = true;
        }
      }
    }
  }

  const auto& chosen = candidates[best.candidate];
  CandidateInjection out;
  out.position = best.position;
  out.ad_id = chosen.ad_id;
  out.ad_sentence = chosen.sentence;
  out.ad_embedding = chosen.embedding;
  out.psi = best.psi_value;
  return out;
}

AdInjectedResponse inject(const SegmentedText& r, const CandidateInjection& choice,
                          Solution solution) {
  if (choice.position < 1 || choice.position > r.size()) {
    throw PreconditionError("inject: position out of range");
  }
  if (choice.ad_sentence.empty()) throw PreconditionError("inject: empty ad sentence");

  const std::size_t i = choice.position;  // 1-based
  const std::size_t splice_at = r.sentences[i - 1].end;
  const std::size_t gap_end = i < r.size() ? r.sentences[i].start : r.original.size();
  const std::string sep = splice_separator(r.original, splice_at, gap_end);

  std::string text = r.original.substr(0, splice_at) + sep + choice.ad_sentence +
                     r.original.substr(splice_at);
  const std::size_t shift = sep.size() + choice.ad_sentence.size();

  SegmentedText seg;
  seg.original = text;
  seg.sentences.reserve(r.size() + 1);
  for (std::size_t s = 0; s < i; ++s) seg.sentences.push_back(r.sentences[s]);
  seg.sentences.push_back(
      {choice.ad_sentence, splice_at + sep.size(), splice_at + sep.size() + choice.ad_sentence.size()});
  for (std::size_t s = i; s < r.size(); ++s) {
    Sentence moved = r.sentences[s];
    moved.start += shift;
    moved.end += shift;
    seg.sentences.push_back(std::move(moved));
  }
  if (r.has_embeddings()) {
    std::vector<Vec> embs;
    embs.reserve(r.size() + 1);
    for (std::size_t s = 0; s < i; ++s) embs.push_back((*r.embeddings)[s]);
    embs.push_back(choice.ad_embedding);
    for (std::size_t s = i; s < r.size(); ++s) embs.push_back((*r.embeddings)[s]);
    seg.embeddings = std::move(embs);
  }

  AdInjectedResponse out;
  out.text = std::move(text);
  out.segmented = std::move(seg);
  out.ad_sentence_indices = {i};  // 0-based index of the spliced sentence
  out.injected_ad = choice.ad_id;
  out.injection_position = choice.position;
  out.solution = solution;
  return out;
}

AdInjectedResponse inject_k(const SegmentedText& r, std::vector<InjectionCandidate> candidates,
                            std::size_t k, Solution solution) {
  if (k < 1) throw PreconditionError("inject_k: k must be positive");
  if (candidates.size() < k) throw PreconditionError("inject_k: fewer than k candidates");

  SegmentedText current = r;
  std::set<std::size_t> ad_indices;
  std::optional<std::string> first_ad;
  std::optional<std::size_t> first_position;

  for (std::size_t round = 0; round < k; ++round) {
    CandidateInjection choice = select_injection(current, candidates);
    AdInjectedResponse step = inject(current, choice, solution);

    std::set<std::size_t> shifted;
    const std::size_t new_index = *step.ad_sentence_indices.begin();
    for (auto idx : ad_indices) {
      shifted.insert(idx >= new_index ? idx + 1 : idx);
    }
    shifted.insert(new_index);
    ad_indices = std::move(shifted);

    if (!first_ad) {
      first_ad = choice.ad_id;
      first_position = choice.position;
    }
    candidates.erase(std::remove_if(candidates.begin(), candidates.end(),
                                    [&](const InjectionCandidate& c) {
                                      return c.ad_id == choice.ad_id;
                                    }),
                     candidates.end());
    current = std::move(step.segmented);
  }

  AdInjectedResponse out;
  out.text = current.original;
  out.segmented = std::move(current);
  out.ad_sentence_indices = std::move(ad_indices);
  out.injected_ad = first_ad;
  out.injection_position = first_position;
  out.solution = solution;
  return out;
}

std::string strip_ad_sentences(const AdInjectedResponse& response) {
  std::string text = response.text;
  const auto& sents = response.segmented.sentences;
  for (auto it = response.ad_sentence_indices.rbegin();
       it != response.ad_sentence_indices.rend(); ++it) {
    std::size_t j = *it;
    if (j >= sents.size()) throw PreconditionError("strip_ad_sentences: index out of range");
    std::size_t erase_begin = j > 0 ? sents[j - 1].end : sents[j].start;
    std::size_t erase_end = j > 0 ? sents[j].end
                                  : (j + 1 < sents.size() ? sents[j + 1].start : sents[j].end);
    text.erase(erase_begin, erase_end - erase_begin);
  }
  return text;
}

}  // namespace gem
