#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "geotax/hash.hpp"
#include "geotax/io.hpp"
#include "geotax/kv.hpp"
#include "geotax/parallel.hpp"
#include "geotax/pca.hpp"
#include "geotax/rdm.hpp"
#include "geotax/sequence.hpp"
#include "geotax/stats.hpp"
#include "test_support.hpp"

using namespace geotax;
using geotax::testing::gaussian;

namespace {

// O(n^2) average ranks: values below plus the mean position among ties.
std::vector<double> brute_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double below = 0, equal = 0;
    for (double x : v) {
      below += x < v[i];
      equal += x == v[i];
    }
    r[i] = below + (equal + 1) / 2;
  }
  return r;
}

double brute_spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = brute_ranks(a), rb = brute_ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i] / n;
    mb += rb[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST(CosineRdm, IdenticalOrthogonalAntipodal) {
  EXPECT_NEAR(cosine_rdm(Matrix::from_rows({{1, 0}, {1, 0}}))(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(cosine_rdm(Matrix::from_rows({{1, 0}, {0, 1}}))(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(cosine_rdm(Matrix::from_rows({{1, 0}, {-1, 0}}))(0, 1), 2.0, 1e-15);
}

TEST(CosineRdm, ZeroRowRejected) {
  EXPECT_GEOTAX_ERROR(cosine_rdm(Matrix::from_rows({{1, 0}, {0, 0}})), ErrorCode::ZeroNormRow);
}

TEST(CosineRdm, PositiveRowScalingInvariant) {
  const Matrix x = gaussian(30, 7, 1);
  Matrix y = x;
  Rng rng(2, "scale");
  for (std::size_t i = 0; i < y.rows(); ++i) {
    const double c = rng.uniform(0.1, 10.0);
    for (double& v : y.row(i)) v *= c;
  }
  const auto a = cosine_rdm(x), b = cosine_rdm(y);
  for (std::size_t i = 0; i < a.condensed().size(); ++i) EXPECT_NEAR(a.condensed()[i], b.condensed()[i], 1e-12);
}

TEST(CosineRdm, CondensedMatchesDoubleLoop) {
  const Matrix x = gaussian(9, 4, 3);
  const auto d = cosine_rdm(x);
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t j = 0; j < 9; ++j) {
      double dot = 0, ni = 0, nj = 0;
      for (std::size_t c = 0; c < 4; ++c) {
        dot += x(i, c) * x(j, c);
        ni += x(i, c) * x(i, c);
        nj += x(j, c) * x(j, c);
      }
      EXPECT_NEAR(d(i, j), i == j ? 0.0 : 1.0 - dot / std::sqrt(ni * nj), 1e-12);
    }
  }
}

TEST(Spearman, Extremes) {
  const std::vector<double> a = {1, 2, 3, 4, 5};
  std::vector<double> r(a.rbegin(), a.rend());
  EXPECT_DOUBLE_EQ(spearman(a, a).value, 1.0);
  EXPECT_DOUBLE_EQ(spearman(a, r).value, -1.0);
}

TEST(Spearman, SmallExampleMatchesOracle) {
  const std::vector<double> a = {1, 2, 3, 4, 5}, b = {2, 1, 4, 3, 5};
  EXPECT_NEAR(spearman(a, b).value, brute_spearman(a, b), 1e-12);
  EXPECT_NEAR(spearman(a, b).value, 0.8, 1e-12);
}

TEST(Spearman, ConstantIsDegenerate) {
  const std::vector<double> a = {1, 1, 1, 1}, b = {1, 2, 3, 4};
  const auto c = spearman(a, b);
  EXPECT_TRUE(c.degenerate);
  EXPECT_EQ(c.value, 0.0);
}

TEST(Spearman, MonotoneTransformInvariant) {
  Rng rng(4, "spearman");
  std::vector<double> a(40), b(40);
  for (std::size_t i = 0; i < 40; ++i) {
    a[i] = rng.normal();
    b[i] = a[i] + rng.normal();
  }
  std::vector<double> ta(a), tb(b);
  for (double& v : ta) v = std::exp(3 * v);
  for (double& v : tb) v = std::atan(v) * 7 - 2;
  EXPECT_NEAR(spearman(a, b).value, spearman(ta, tb).value, 1e-15);
  EXPECT_NEAR(spearman(a, b).value, spearman(average_ranks(a), average_ranks(b)).value, 1e-15);
}

TEST(Ranks, AverageTies) {
  const std::vector<double> v = {10, 20, 10, 30, 20, 10};
  EXPECT_EQ(average_ranks(v), brute_ranks(v));
}

TEST(Pca, LineHasUnitExplainedRatio) {
  Matrix x(50, 3);
  for (std::size_t i = 0; i < 50; ++i) {
    const double t = static_cast<double>(i) - 20.0;
    x(i, 0) = 1 + 2 * t;
    x(i, 1) = -3 * t;
    x(i, 2) = 0.5 * t;
  }
  EXPECT_NEAR(pca_project(x, 1).explained_variance_ratio[0], 1.0, 1e-9);
}

TEST(Pca, IsotropicGaussianSpreadsVariance) {
  const auto r = pca_project(gaussian(5000, 10, 5), 10);
  for (double v : r.explained_variance_ratio) EXPECT_NEAR(v, 0.1, 0.02);
}

TEST(Pca, FullRankReconstructs) {
  const Matrix x = gaussian(20, 6, 6);
  const auto r = pca_project(x, 6);
  Matrix rec = r.scores * r.components;
  double err = 0, norm = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double centred = x(i, j) - r.mean[j];
      err += (rec(i, j) - centred) * (rec(i, j) - centred);
      norm += centred * centred;
    }
  }
  EXPECT_LT(std::sqrt(err / norm), 1e-8);
}

TEST(Pca, RotationKeepsSingularValues) {
  const Matrix x = gaussian(40, 8, 7);
  const Matrix q = geotax::testing::random_orthogonal(8, 8);
  const auto a = pca_project(x, 8), b = pca_project(x * q, 8);
  for (std::size_t i = 0; i < 8; ++i)
    EXPECT_NEAR(a.singular_values[i], b.singular_values[i], 1e-9 * a.singular_values[0]);
}

TEST(Rng, SameSpecSameMillionDraws) {
  Rng a(320, "x"), b(320, "x");
  for (int i = 0; i < 1000000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, StreamsDiffer) {
  Rng a(320, "x"), b(320, "y");
  int same = 0;
  for (int i = 0; i < 1000; ++i) same += a.next_u64() == b.next_u64();
  EXPECT_EQ(same, 0);
}

TEST(Rng, GoldenSeed320) {
  std::ifstream in(geotax::testing::data_path("golden/rng_seed320.txt"));
  ASSERT_TRUE(in.good());
  Rng rng(320, "default");
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng.next_u64()));
    EXPECT_EQ(line, buf);
    ++count;
  }
  EXPECT_EQ(count, 4);
}

TEST(Rng, SplitIsPure) {
  const Rng root(9, "root");
  Rng a = root.split("tag"), b = root.split("tag"), c = root.split(std::uint64_t{3});
  EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(root.split(std::uint64_t{3}).next_u64(), root.split(std::uint64_t{4}).next_u64());
  (void)c;
}

TEST(Rng, BelowIsInRangeAndCoversValues) {
  Rng rng(1, "below");
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(Rng, SampleWithoutReplacementDistinct) {
  Rng rng(2, "swr");
  auto s = rng.sample_without_replacement(100, 30);
  std::set<std::size_t> u(s.begin(), s.end());
  EXPECT_EQ(u.size(), 30u);
  EXPECT_LT(*u.rbegin(), 100u);
}

TEST(Io, Emb1RoundTrip) {
  const Matrix m = Matrix::from_rows({{0.5, -1, 2, 3.25}, {4, 5, 6, 7}, {8, 9, -10, 0.125}});
  const auto dir = geotax::testing::temp_dir("emb1");
  write_emb1(dir / "m.emb", EmbeddingMatrix(m));
  EXPECT_EQ(read_emb1(dir / "m.emb").values(), m);
}

TEST(Io, Emb1LabelsRoundTrip) {
  const EmbeddingMatrix x(Matrix::from_rows({{1, 2}, {3, 4}}), std::vector<std::uint32_t>{7, 9});
  EXPECT_EQ(decode_emb1(encode_emb1(x)), x);
}

TEST(Io, Emb1Errors) {
  const auto bytes = encode_emb1(EmbeddingMatrix(Matrix::from_rows({{1, 2}, {3, 4}})));
  EXPECT_GEOTAX_ERROR(decode_emb1(bytes.substr(0, bytes.size() - 3)), ErrorCode::TruncatedFile);
  EXPECT_GEOTAX_ERROR(decode_emb1("EMB2" + bytes.substr(4)), ErrorCode::BadMagic);
  EXPECT_GEOTAX_ERROR(decode_emb1(bytes + std::string(3, '\0')), ErrorCode::DimensionMismatch);
}

TEST(Io, CsvHeaderFixture) {
  const Matrix m = read_csv(geotax::testing::data_path("fixtures/header.csv"), {.header = true});
  EXPECT_EQ(m.rows(), 3u);
  EXPECT_EQ(m.cols(), 4u);
  EXPECT_EQ(m(2, 3), -3.0);
}

TEST(Io, CsvRoundTripExact) {
  const Matrix m = gaussian(5, 3, 11);
  const auto dir = geotax::testing::temp_dir("csv");
  write_csv(dir / "m.csv", m);
  EXPECT_EQ(read_csv(dir / "m.csv"), m);
  EXPECT_EQ(read_embeddings(dir / "m.csv").values(), m);
}

TEST(Io, NonFiniteRejected) {
  EXPECT_GEOTAX_ERROR(EmbeddingMatrix(Matrix::from_rows({{1, NAN}})), ErrorCode::DegenerateInput);
}

TEST(Kv, SectionsCommentsAndTypes) {
  const auto cfg = KvConfig::parse(
      "experiment = stability  # trailing\n"
      "[stability]\n"
      "n_splits = 12\n"
      "variant = anchor\n"
      "\n"
      "mine.rhos = 0, 0.3,0.9\n");
  EXPECT_EQ(cfg.require("experiment"), "stability");
  EXPECT_EQ(cfg.get_int("stability.n_splits", 0), 12);
  EXPECT_EQ(cfg.get_string("stability.variant", ""), "anchor");
  EXPECT_EQ(cfg.get_doubles("stability.mine.rhos", {}), (std::vector<double>{0, 0.3, 0.9}));
  EXPECT_EQ(KvConfig::parse(cfg.dump()).entries(), cfg.entries());
}

TEST(Kv, ErrorsNameKeyAndLine) {
  try {
    KvConfig::parse("a = 1\na = 2\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  const auto cfg = KvConfig::parse("x = 1\nn = abc\n");
  try {
    cfg.get_int("n", 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("'n'"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  try {
    cfg.require("missing.key");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("missing.key"), std::string::npos);
  }
}

TEST(Hash, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Parallel, ChunkedSumIndependentOfThreads) {
  Rng rng(12, "sum");
  std::vector<double> v(100000);
  for (double& x : v) x = rng.normal() * 1e6;
  auto run = [&](std::size_t threads) {
    set_thread_count(threads);
    return chunked_sum(v.size(), 1000, [&](std::size_t b, std::size_t e) {
      double s = 0;
      for (std::size_t i = b; i < e; ++i) s += v[i];
      return s;
    });
  };
  const double one = run(1), four = run(4);
  set_thread_count(1);
  EXPECT_EQ(one, four);
}

TEST(Sequence, AlphabetsAndErrors) {
  EXPECT_EQ(dna("acgT").to_string(), "ACGT");
  EXPECT_GEOTAX_ERROR(dna("ACGN"), ErrorCode::BadBase);
  EXPECT_GEOTAX_ERROR(SymbolSequence::from_string("ACDB", Alphabet::protein()), ErrorCode::BadResidue);
  EXPECT_EQ(hamming(dna("ACGT"), dna("ACCA")), 2u);
  EXPECT_GEOTAX_ERROR(hamming(dna("AC"), dna("ACG")), ErrorCode::LengthMismatch);
}
