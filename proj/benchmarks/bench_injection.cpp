#include "gem/injection.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace gem;

std::vector<Vec> random_vectors(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Vec> out(n, Vec(dim));
  for (auto& v : out) {
    for (auto& x : v) x = dist(rng);
  }
  return out;
}

SegmentedText synthetic(const std::vector<Vec>& embeddings) {
  SegmentedText st;
  std::string text;
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    std::string s = "Sentence " + std::to_string(i) + ".";
    std::size_t start = text.size();
    text += s;
    st.sentences.push_back({s, start, text.size()});
    if (i + 1 < embeddings.size()) text += " ";
  }
  st.original = text;
  st.embeddings = embeddings;
  return st;
}

void BM_SelectInjection(benchmark::State& state) {
  const std::size_t sentences = static_cast<std::size_t>(state.range(0));
  const std::size_t candidates = static_cast<std::size_t>(state.range(1));
  const std::size_t dim = 64;
  auto r = synthetic(random_vectors(sentences, dim, 1));
  std::vector<InjectionCandidate> cands;
  auto embs = random_vectors(candidates, dim, 2);
  for (std::size_t i = 0; i < candidates; ++i) {
    cands.push_back({"ad-" + std::to_string(i), "Ad sentence.", embs[i], 0.5});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_injection(r, cands));
  }
  state.SetItemsProcessed(static_cast<long>(state.iterations()) *
                          static_cast<long>((sentences - 1) * candidates));
}

void BM_InjectK(benchmark::State& state) {
  const std::size_t dim = 64;
  auto r = synthetic(random_vectors(12, dim, 3));
  std::vector<InjectionCandidate> cands;
  auto embs = random_vectors(8, dim, 4);
  for (std::size_t i = 0; i < embs.size(); ++i) {
    cands.push_back({"ad-" + std::to_string(i),
                     "Ad sentence " + std::to_string(i) + " for https://x.example.com.",
                     embs[i], 0.5});
  }
  const std::size_t k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(inject_k(r, cands, k));
  }
}

}  // namespace

BENCHMARK(BM_SelectInjection)->Args({6, 5})->Args({12, 8})->Args({40, 8})->Args({100, 16});
BENCHMARK(BM_InjectK)->Arg(1)->Arg(2)->Arg(4);
