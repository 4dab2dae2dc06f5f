#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "parlalign/aligner.hpp"
#include "parlalign/segmenter.hpp"

namespace {

struct Corpus {
  std::vector<parlalign::GtWord> gt;
  std::vector<parlalign::TimedWord> ref;
};

// Distinct-ish pseudo-words; every fifth reference word is misspelled.
Corpus make_corpus(std::size_t n) {
  std::mt19937_64 rng(n);
  const std::string letters = "abcdefghijklmnoprstuvz";
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    std::string w;
    const std::size_t len = 3 + rng() % 7;
    for (std::size_t k = 0; k < len; ++k) w.push_back(letters[rng() % letters.size()]);
    c.gt.push_back({i, w, w});
    if (rng() % 5 == 0) w[rng() % w.size()] = 'q';
    c.ref.push_back({w, 0.4 * static_cast<double>(i), 0.4 * static_cast<double>(i) + 0.3});
  }
  return c;
}

void BM_Align(benchmark::State& state) {
  const auto c = make_corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parlalign::align(c.gt, c.ref));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * c.ref.size()));
}
BENCHMARK(BM_Align)->Arg(1000)->Arg(32000)->Unit(benchmark::kMillisecond);

void BM_BuildSegments(benchmark::State& state) {
  const auto c = make_corpus(32000);
  const auto anchors = parlalign::align(c.gt, c.ref);
  for (auto _ : state) benchmark::DoNotOptimize(parlalign::build_segments(anchors, c.gt));
}
BENCHMARK(BM_BuildSegments)->Unit(benchmark::kMillisecond);

}  // namespace
