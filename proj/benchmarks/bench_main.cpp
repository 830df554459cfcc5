#include <benchmark/benchmark.h>

#include <vector>

#include "geotax/mlp.hpp"
#include "geotax/procrustes.hpp"
#include "geotax/quantize.hpp"
#include "geotax/rdm.hpp"
#include "geotax/rng.hpp"
#include "geotax/stability.hpp"
#include "geotax/stats.hpp"
#include "geotax/texture.hpp"

using namespace geotax;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed, "bench");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

void BM_CosineRdm(benchmark::State& state) {
  const Matrix x = random_matrix(static_cast<std::size_t>(state.range(0)), 256, 1);
  for (auto _ : state) benchmark::DoNotOptimize(cosine_rdm(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CosineRdm)->RangeMultiplier(2)->Range(128, 1024)->Complexity(benchmark::oNSquared);

void BM_Spearman(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2, "bench");
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng.normal();
    b[i] = a[i] + rng.normal();
  }
  for (auto _ : state) benchmark::DoNotOptimize(spearman(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Spearman)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity(benchmark::oNLogN);

void BM_StabilityEvaluate(benchmark::State& state) {
  const EmbeddingMatrix x(random_matrix(static_cast<std::size_t>(state.range(0)), 64, 3));
  const EmbeddingMatrix y(random_matrix(static_cast<std::size_t>(state.range(0)), 64, 4));
  stability::SplitConfig cfg;
  cfg.n_splits = 5;
  for (auto _ : state) benchmark::DoNotOptimize(stability::evaluate(x, y, {}, cfg, {320, "bench"}, "bench"));
}
BENCHMARK(BM_StabilityEvaluate)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_Kmeans(benchmark::State& state) {
  const Matrix x = random_matrix(2000, 3, 5);
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(quantize::kmeans_fit(x, k, {320, "bench"}));
}
BENCHMARK(BM_Kmeans)->RangeMultiplier(4)->Range(8, 512)->Unit(benchmark::kMillisecond);

void BM_Procrustes(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(500, d, 6);
  const Matrix b = random_matrix(500, d, 7);
  for (auto _ : state) benchmark::DoNotOptimize(procrustes::procrustes_align(a, b));
}
BENCHMARK(BM_Procrustes)->RangeMultiplier(4)->Range(16, 256)->Unit(benchmark::kMillisecond);

void BM_MlpStep(benchmark::State& state) {
  const auto cfg = mine::statistics_network(static_cast<std::size_t>(state.range(0)));
  mine::Mlp net(cfg.widths, {320, "bench"});
  mine::Adam adam(net.parameter_count(), cfg.lr);
  const Matrix x = random_matrix(cfg.batch, cfg.widths.front(), 8);
  const Matrix g = random_matrix(cfg.batch, cfg.widths.back(), 9);
  Rng rng(10, "bench/dropout");
  std::vector<double> grad;
  for (auto _ : state) {
    mine::Mlp::Tape tape;
    net.forward(x, cfg.dropout, &rng, tape);
    net.backward(tape, g, grad);
    adam.step(net.parameters(), grad);
  }
}
BENCHMARK(BM_MlpStep)->Arg(16)->Arg(64)->Arg(256);

void BM_KmerHistogram(benchmark::State& state) {
  Rng rng(11, "bench");
  SymbolSequence s{Alphabet::dna(), std::vector<std::uint16_t>(100000)};
  for (auto& b : s.symbols) b = static_cast<std::uint16_t>(rng.below(4));
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(texture::kmer_histogram(s, k));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * 100000);
}
BENCHMARK(BM_KmerHistogram)->DenseRange(1, 6);

void BM_DinucleotideShuffle(benchmark::State& state) {
  Rng rng(12, "bench");
  SymbolSequence s{Alphabet::dna(), std::vector<std::uint16_t>(static_cast<std::size_t>(state.range(0)))};
  for (auto& b : s.symbols) b = static_cast<std::uint16_t>(rng.below(4));
  for (auto _ : state) benchmark::DoNotOptimize(texture::dinucleotide_shuffle(s, {320, "bench"}));
}
BENCHMARK(BM_DinucleotideShuffle)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
