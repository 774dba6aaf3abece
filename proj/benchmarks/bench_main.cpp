#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "parmine/metrics.hpp"
#include "parmine/mining.hpp"
#include "parmine/text.hpp"
#include "synthetic.hpp"

using namespace parmine;

namespace {

std::vector<text::TokenList> corpus(std::size_t sentences, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<text::TokenList> out(sentences);
  for (auto& s : out) {
    const auto len = 8 + rng() % 20;
    for (std::size_t i = 0; i < len; ++i) s.push_back("w" + std::to_string(rng() % 2000));
  }
  return out;
}

void BM_Tokenize(benchmark::State& state) {
  const std::string line =
      "Kucing itu, yang bernama \"Si Belang\", makan ikan (goreng) di rumah Pak Budi pada 12.30 siang!";
  for (auto _ : state) benchmark::DoNotOptimize(text::tokenize(line));
  state.SetBytesProcessed(std::int64_t(state.iterations()) * std::int64_t(line.size()));
}
BENCHMARK(BM_Tokenize);

void BM_Bleu(benchmark::State& state) {
  const auto hyp = corpus(state.range(0), 1);
  const auto ref = corpus(state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::bleu(hyp, ref));
  state.SetItemsProcessed(std::int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Bleu)->Arg(100)->Arg(1000)->Arg(10000);

void BM_Rouge(benchmark::State& state) {
  const auto a = corpus(1000, 3);
  const auto b = corpus(1000, 4);
  for (auto _ : state) {
    for (std::size_t i = 0; i < a.size(); ++i) benchmark::DoNotOptimize(metrics::rouge1_f1(a[i], b[i]));
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) * 1000);
}
BENCHMARK(BM_Rouge);

void BM_AlignSentences(benchmark::State& state) {
  const auto c = synth::make_comparable_corpus(5, 1, state.range(0), state.range(0));
  const auto src = text::split_sentences(c.source_docs[0].text);
  const auto tgt = text::split_sentences(c.target_docs[0].text);
  const mining::MiningConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(mining::align_sentences(src, tgt, c.dict, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AlignSentences)->Arg(10)->Arg(40)->Arg(160)->Complexity();

void BM_DiversityFilter(benchmark::State& state) {
  std::mt19937_64 rng(6);
  std::vector<mining::AlignedPair> pairs;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    std::string s;
    for (int j = 0; j < 10; ++j) s += "w" + std::to_string(rng() % 50) + " ";
    pairs.push_back({text::Sentence{s}, text::Sentence{"t"}, double(rng() % 1000) / 1000.0, "d"});
  }
  const mining::MiningConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(mining::diversity_filter(pairs, cfg));
  state.SetItemsProcessed(std::int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_DiversityFilter)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
