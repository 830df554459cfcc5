#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "geotax/perturb.hpp"
#include "geotax/texture.hpp"
#include "test_support.hpp"

using namespace geotax;
using namespace geotax::texture;

namespace {

SymbolSequence random_dna(std::size_t n, std::uint64_t seed) {
  Rng rng(seed, "dna");
  SymbolSequence s{Alphabet::dna(), std::vector<std::uint16_t>(n)};
  for (auto& b : s.symbols) b = static_cast<std::uint16_t>(rng.below(4));
  return s;
}

// Every sequence of the same length, first base and dinucleotide counts.
std::vector<std::string> brute_force_shuffles(const SymbolSequence& s) {
  const auto want = kmer_histogram(s, 2);
  const std::size_t n = s.size();
  std::vector<std::string> out;
  std::vector<std::uint16_t> cur(n);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 4;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      cur[i] = static_cast<std::uint16_t>(c % 4);
      c /= 4;
    }
    if (cur[0] != s.symbols[0]) continue;
    const SymbolSequence cand{Alphabet::dna(), cur};
    if (kmer_histogram(cand, 2) == want) out.push_back(cand.to_string());
  }
  return out;
}

}  // namespace

TEST(Kmer, HistogramBasics) {
  const auto h = kmer_histogram(dna("AACGT"), 2);
  EXPECT_EQ(h.total, 4u);
  EXPECT_EQ(h.counts[0], 1u);   // AA
  EXPECT_EQ(h.counts[1], 1u);   // AC
  EXPECT_EQ(h.counts[6], 1u);   // CG
  EXPECT_EQ(h.counts[11], 1u);  // GT
  EXPECT_GEOTAX_ERROR(kmer_histogram(dna("ACG"), 4), ErrorCode::TooShort);
  EXPECT_GEOTAX_ERROR(kmer_histogram(SymbolSequence::from_string("MK", Alphabet::protein()), 1),
                      ErrorCode::BadBase);
}

TEST(Kmer, ReverseComplementIsAPermutation) {
  for (std::size_t k = 1; k <= 4; ++k) {
    const auto perm = complement_permutation(k);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto s = random_dna(500, seed);
      const auto fwd = kmer_histogram(s, k);
      const auto rc = kmer_histogram(perturb::reverse_complement(s), k);
      for (std::size_t r = 0; r < fwd.counts.size(); ++r) ASSERT_EQ(rc.counts[perm[r]], fwd.counts[r]);
    }
  }
  EXPECT_EQ(complement_permutation(1), (std::vector<std::size_t>{3, 2, 1, 0}));
}

TEST(Kmer, RcCosine) {
  EXPECT_NEAR(rc_kmer_cosine(dna("ACGT"), 2), 1.0, 1e-15);
  EXPECT_NEAR(rc_kmer_cosine(dna("AAAA"), 1), 0.0, 1e-15);
}

TEST(Shuffle, PreservesDinucleotideCountsAndEnds) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto s = random_dna(1000, seed);
    const auto t = dinucleotide_shuffle(s, {seed, "shuffle"});
    ASSERT_EQ(kmer_histogram(t, 1), kmer_histogram(s, 1));
    ASSERT_EQ(kmer_histogram(t, 2), kmer_histogram(s, 2));
    EXPECT_EQ(t.symbols.front(), s.symbols.front());
    EXPECT_EQ(t.symbols.back(), s.symbols.back());
  }
}

TEST(Shuffle, ActuallyPermutesAndIsDeterministic) {
  const auto s = random_dna(300, 1);
  EXPECT_NE(dinucleotide_shuffle(s, {1, "x"}), s);
  EXPECT_EQ(dinucleotide_shuffle(s, {1, "x"}), dinucleotide_shuffle(s, {1, "x"}));
  EXPECT_GEOTAX_ERROR(dinucleotide_shuffle(dna("A"), {1, "x"}), ErrorCode::TooShort);
  EXPECT_EQ(dinucleotide_shuffle(dna("AAAA"), {1, "x"}).to_string(), "AAAA");
}

TEST(Shuffle, UniformOverValidSequences) {
  const auto s = dna("ACAGTACGTAC");
  const auto valid = brute_force_shuffles(s);
  ASSERT_GT(valid.size(), 4u);
  std::map<std::string, std::size_t> seen;
  const std::size_t draws = 20000;
  for (std::size_t i = 0; i < draws; ++i) ++seen[dinucleotide_shuffle(s, {i, "uniform"}).to_string()];
  EXPECT_EQ(seen.size(), valid.size());
  const double expected = static_cast<double>(draws) / static_cast<double>(valid.size());
  double chi2 = 0;
  for (const auto& v : valid) chi2 += std::pow(static_cast<double>(seen[v]) - expected, 2) / expected;
  // Generous bound: mean df, plus six standard deviations.
  const double df = static_cast<double>(valid.size() - 1);
  EXPECT_LT(chi2, df + 6 * std::sqrt(2 * df));
}

TEST(Markov, RefitRecoversTransitions) {
  MarkovModel m;
  m.initial = {0.25, 0.25, 0.25, 0.25};
  m.transition = {{{0.7, 0.1, 0.1, 0.1}, {0.2, 0.2, 0.5, 0.1}, {0.25, 0.25, 0.25, 0.25}, {0.1, 0.0, 0.0, 0.9}}};
  const std::vector<SymbolSequence> corpus = {gen_markov(m, 200000, {1, "markov"})};
  const auto fit = fit_markov(corpus);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(fit.transition[i][j], m.transition[i][j], 0.01);
  EXPECT_EQ(gen_markov(m, 100, {2, "m"}), gen_markov(m, 100, {2, "m"}));
}

TEST(Markov, EmptyRowFallsBackToUniform) {
  const std::vector<SymbolSequence> corpus = {dna("AAAC")};
  const auto fit = fit_markov(corpus);
  EXPECT_TRUE(fit.fallback[2]);
  EXPECT_FALSE(fit.fallback[0]);
  EXPECT_DOUBLE_EQ(fit.transition[2][1], 0.25);
  EXPECT_NEAR(fit.transition[0][0], 2.0 / 3.0, 1e-15);
}

TEST(Recovery, ReferenceTableValues) {
  EXPECT_NEAR(recovery_fraction(0.873, 0.858, 0.139), 0.9796, 1e-4);
  EXPECT_NEAR(recovery_fraction(0.873, 0.167, 0.139), 0.0381, 1e-4);
  EXPECT_NEAR(recovery_fraction(0.873, 0.858, 0.139), 0.97, 0.02);
  EXPECT_NEAR(recovery_fraction(0.873, 0.167, 0.139), 0.03, 0.02);
  EXPECT_EQ(recovery_fraction(0.9, 0.9, 0.1), 1.0);
  EXPECT_EQ(recovery_fraction(0.9, 0.1, 0.1), 0.0);
  EXPECT_GEOTAX_ERROR(recovery_fraction(0.5, 0.4, 0.5), ErrorCode::DegenerateGap);
}

TEST(Corpus, ShapesAndDeterminism) {
  const auto c = synthetic_corpus(5, 333, {1, "corpus"});
  ASSERT_EQ(c.size(), 5u);
  for (const auto& s : c) EXPECT_EQ(s.size(), 333u);
  EXPECT_EQ(c, synthetic_corpus(5, 333, {1, "corpus"}));
  EXPECT_EQ(uniform_corpus(3, 10, {1, "u"}).size(), 3u);
}

TEST(Embedders, KmerEmbedderRowsAreFrequencies) {
  const std::vector<SymbolSequence> seqs = {dna("ACGTACGT"), dna("AAAAAAAA")};
  const Matrix m = kmer_embedder({2})(seqs);
  ASSERT_EQ(m.cols(), 16u);
  double sum = 0;
  for (double v : m.row(0)) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_EQ(m(1, 0), 1.0);
  const Matrix p = projected_kmer_embedder()(seqs);
  EXPECT_EQ(p.cols(), 16u);
  EXPECT_EQ(p, projected_kmer_embedder()(seqs));
}

TEST(Experiment, RealAndRandomAnchorTheScale) {
  const auto real = synthetic_corpus(60, 400, {320, "texture-real"});
  stability::SplitConfig cfg;
  cfg.n_splits = 4;
  cfg.n_bootstrap = 2;
  const auto rows = texture_experiment(real, projected_kmer_embedder(), cfg, {320, "texture"});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].condition, "Real");
  EXPECT_EQ(rows[3].condition, "Random");
  EXPECT_DOUBLE_EQ(rows[0].recovery, 1.0);
  EXPECT_DOUBLE_EQ(rows[3].recovery, 0.0);
  EXPECT_GT(rows[0].rc_rdm, rows[3].rc_rdm);
  // The shuffle keeps each sequence's composition, so it tracks Real closely.
  EXPECT_GT(rows[1].recovery, 0.8);
  const auto csv = texture_table_csv(rows);
  EXPECT_EQ(csv.rfind("Condition,RC RDM,RC Composite,Recovery\nReal,", 0), 0u);
  EXPECT_EQ(csv, texture_table_csv(texture_experiment(real, projected_kmer_embedder(), cfg, {320, "texture"})));
}
