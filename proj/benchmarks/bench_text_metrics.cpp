#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "parlalign/text_metrics.hpp"

namespace {

std::string random_sentence(std::mt19937_64& rng, std::size_t words) {
  static const char* kVocab[] = {"vážené", "dámy", "páni", "poslanci", "vláda", "zákon", "návrh", "rokovanie",
                                 "ďakujem", "slovo", "predsedajúca", "schôdza", "hlasovanie", "pozmeňujúci"};
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += kVocab[rng() % std::size(kVocab)];
    if (rng() % 7 == 0) out.push_back(',');
  }
  return out;
}

void BM_Normalize(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const std::string text = random_sentence(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parlalign::normalize(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Normalize)->Arg(100)->Arg(10000);

void BM_Levenshtein(benchmark::State& state) {
  const std::string a = "predsedajúca", b = "predsedajuca";
  for (auto _ : state) benchmark::DoNotOptimize(parlalign::levenshtein(a, b));
}
BENCHMARK(BM_Levenshtein);

void BM_WithinDistance1(benchmark::State& state) {
  const std::u32string a = U"pozmeňujúci", b = U"pozmenujúci";
  for (auto _ : state) benchmark::DoNotOptimize(parlalign::within_distance(a, b, 1));
}
BENCHMARK(BM_WithinDistance1);

void BM_Wer(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ref = parlalign::normalize(random_sentence(rng, n));
  const auto hyp = parlalign::normalize(random_sentence(rng, n));
  for (auto _ : state) benchmark::DoNotOptimize(parlalign::wer(ref, hyp));
  state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Wer)->RangeMultiplier(4)->Range(16, 1024)->Complexity(benchmark::oNSquared);

}  // namespace
