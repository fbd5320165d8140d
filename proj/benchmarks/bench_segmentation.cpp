#include "gem/segmentation.hpp"

#include <benchmark/benchmark.h>

namespace {

std::string prose(std::size_t sentences) {
  std::string text;
  for (std::size_t i = 0; i < sentences; ++i) {
    text += "This is sentence number " + std::to_string(i) +
            " with a link to https://example.com/page" + std::to_string(i) +
            " and some trailing words. ";
  }
  return text;
}

std::string markdown(std::size_t items) {
  std::string text = "# Heading\nIntro paragraph with two sentences. Here is the second.\n";
  for (std::size_t i = 0; i < items; ++i) {
    text += "- item " + std::to_string(i) + " with [a link](https://example.com/" +
            std::to_string(i) + ")\n";
  }
  return text;
}

void BM_SegmentProse(benchmark::State& state) {
  auto text = prose(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gem::segment(text));
  }
  state.SetBytesProcessed(static_cast<long>(state.iterations()) *
                          static_cast<long>(text.size()));
}

void BM_SegmentMarkdown(benchmark::State& state) {
  auto text = markdown(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gem::segment(text));
  }
  state.SetBytesProcessed(static_cast<long>(state.iterations()) *
                          static_cast<long>(text.size()));
}

}  // namespace

BENCHMARK(BM_SegmentProse)->Arg(10)->Arg(100)->Arg(1000);
BENCHMARK(BM_SegmentMarkdown)->Arg(10)->Arg(100);
