#include "gem/index.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace gem;

AdDatabase synthetic_db(std::size_t n) {
  AdDatabase db;
  db.source_label = "bench";
  const char* words[] = {"river", "atlas", "coffee", "harbor", "stone", "meadow"};
  for (std::size_t i = 0; i < n; ++i) {
    Ad ad;
    ad.id = "ad-" + std::to_string(i);
    ad.name = std::string(words[i % 6]) + " " + words[(i / 6) % 6] + " " + std::to_string(i);
    ad.description = std::string("services around ") + words[(i * 7) % 6];
    ad.url = "https://ad" + std::to_string(i) + ".example.com";
    ad.topic = words[i % 6];
    db.ads.push_back(std::move(ad));
  }
  return db;
}

void BM_BuildIndex(benchmark::State& state) {
  auto db = synthetic_db(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    GatewayConfig cfg;
    cfg.cache_enabled = false;
    Gateway gateway(std::make_shared<StubBackend>(), cfg);
    benchmark::DoNotOptimize(build_index(db, gateway, "embed"));
  }
}

void BM_RetrieveTopT(benchmark::State& state) {
  auto db = synthetic_db(static_cast<std::size_t>(state.range(0)));
  Gateway gateway(std::make_shared<StubBackend>());
  auto index = build_index(db, gateway, "embed");
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        retrieve_top_t(index, "coffee by the harbor", 5, RetrievalBasis::response, gateway));
  }
  state.SetItemsProcessed(static_cast<long>(state.iterations()) * state.range(0));
}

}  // namespace

BENCHMARK(BM_BuildIndex)->Arg(100)->Arg(1000);
BENCHMARK(BM_RetrieveTopT)->Arg(100)->Arg(1000)->Arg(10000);
