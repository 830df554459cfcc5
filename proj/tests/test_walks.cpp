#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "geotax/walks.hpp"
#include "test_support.hpp"

using namespace geotax;
using namespace geotax::walks;
using geotax::testing::gaussian;
using geotax::testing::random_orthogonal;

namespace {

SymbolSequence random_dna(std::size_t n, std::uint64_t seed) {
  Rng rng(seed, "dna");
  SymbolSequence s{Alphabet::dna(), std::vector<std::uint16_t>(n)};
  for (auto& b : s.symbols) b = static_cast<std::uint16_t>(rng.below(4));
  return s;
}

// A 3-D angular path placed isometrically into d dimensions.
Matrix angular_path(std::size_t d, std::size_t offset) {
  const Matrix q = random_orthogonal(3, 42);
  Matrix out(50, d);
  for (std::size_t i = 0; i < 50; ++i) {
    const double t = 0.05 * static_cast<double>(i * i % 17) + 0.1 * static_cast<double>(i);
    const double base[3] = {std::cos(t), std::sin(t), 0.3 + 0.01 * static_cast<double>(i)};
    for (std::size_t j = 0; j < 3; ++j) {
      double v = 0;
      for (std::size_t k = 0; k < 3; ++k) v += base[k] * q(k, j);
      out(i, offset + j) = (1.0 + static_cast<double>(i)) * v;
    }
  }
  return out;
}

}  // namespace

TEST(Interpolation, EndpointsAndAlpha) {
  const auto a = dynamics::gen_lorenz({1, "a"}, 200);
  const auto b = dynamics::gen_lorenz({2, "b"}, 200);
  const std::vector<dynamics::Trajectory> both = {a, b};
  const auto r = dynamics::fit_global_range(both);
  const auto w = build_interpolation_walk(a, b, r);
  ASSERT_EQ(w.steps.size(), 101u);
  EXPECT_EQ(w.steps.front(), dynamics::discretize(a, r));
  EXPECT_EQ(w.steps.back(), dynamics::discretize(b, r));
  EXPECT_EQ(w.alpha.front(), 0.0);
  EXPECT_EQ(w.alpha.back(), 1.0);
  for (std::size_t i = 1; i < w.alpha.size(); ++i) EXPECT_GT(w.alpha[i], w.alpha[i - 1]);
}

TEST(Interpolation, IdenticalEndpointsAndErrors) {
  const auto a = dynamics::gen_lorenz({1, "a"}, 100);
  const auto r = dynamics::fit_global_range({&a, 1});
  const auto w = build_interpolation_walk(a, a, r, 11);
  for (const auto& s : w.steps) EXPECT_EQ(s, w.steps.front());
  const auto c = dynamics::gen_lorenz({1, "a"}, 99);
  EXPECT_GEOTAX_ERROR(build_interpolation_walk(a, c, r), ErrorCode::LengthMismatch);
}

TEST(Mutation, OneChangePerStep) {
  const auto wt = random_dna(1000, 3);
  const auto w = build_mutation_walk(wt, 121, {250, 750}, {320, "walk"});
  ASSERT_EQ(w.steps.size(), 122u);
  EXPECT_EQ(w.steps.front(), wt);
  EXPECT_FALSE(w.changed_position.front().has_value());
  for (std::size_t i = 1; i < w.steps.size(); ++i) {
    EXPECT_EQ(hamming(w.steps[i - 1], w.steps[i]), 1u);
    EXPECT_EQ(hamming(wt, w.steps[i]), i);
    const auto pos = *w.changed_position[i];
    EXPECT_GE(pos, 250u);
    EXPECT_LT(pos, 750u);
    EXPECT_NE(w.steps[i].symbols[pos], wt.symbols[pos]);
  }
}

TEST(Mutation, SingleMutationAndLandmark) {
  const auto wt = random_dna(200, 4);
  const auto one = build_mutation_walk(wt, 1, {50, 150}, {1, "walk"});
  ASSERT_EQ(one.steps.size(), 2u);
  EXPECT_EQ(hamming(one.steps[0], one.steps[1]), 1u);

  const Landmark lm{100, wt.to_string()[100] == 'G' ? 'C' : 'G'};
  const auto w = build_mutation_walk(wt, 20, {50, 150}, {1, "walk"}, lm);
  ASSERT_EQ(w.steps.size(), 22u);
  ASSERT_TRUE(w.landmark_index.has_value());
  EXPECT_EQ(*w.changed_position[*w.landmark_index], 100u);
  EXPECT_EQ(w.steps.back().to_string()[100], lm.base);
  const auto again = build_mutation_walk(wt, 20, {50, 150}, {1, "walk"}, lm);
  EXPECT_EQ(again.steps, w.steps);
  EXPECT_EQ(again.landmark_index, w.landmark_index);
}

TEST(Mutation, RegionTooSmall) {
  const auto wt = random_dna(100, 5);
  EXPECT_GEOTAX_ERROR(build_mutation_walk(wt, 11, {0, 10}, {1, "walk"}), ErrorCode::RegionTooSmall);
  EXPECT_GEOTAX_ERROR(build_mutation_walk(wt, 1, {90, 110}, {1, "walk"}), ErrorCode::RegionTooSmall);
}

TEST(Mutation, FastaHeaders) {
  const auto wt = random_dna(60, 6);
  const auto w = build_mutation_walk(wt, 2, {10, 50}, {1, "walk"});
  const auto recs = to_fasta(w);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0].header, "step=0 pos=-");
  EXPECT_EQ(recs[1].header, "step=1 pos=" + std::to_string(*w.changed_position[1]));
  EXPECT_EQ(recs[2].sequence, w.steps[2].to_string());
}

TEST(Lipschitz, ConstantAndLinearPaths) {
  const auto flat = lipschitz_l2(Matrix(10, 3, 1.0));
  for (double v : flat.values) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(flat.spikes.empty());
  EXPECT_EQ(flat.smoothness_ratio, 1.0);

  Matrix line(20, 2);
  for (std::size_t i = 0; i < 20; ++i) {
    line(i, 0) = 3.0 * static_cast<double>(i);
    line(i, 1) = 4.0 * static_cast<double>(i);
  }
  const auto p = lipschitz_l2(line);
  ASSERT_EQ(p.values.size(), 19u);
  for (double v : p.values) EXPECT_NEAR(v, 5.0, 1e-12);
  EXPECT_NEAR(p.smoothness_ratio, 1.0, 1e-12);
}

TEST(Lipschitz, TeleportIsTheOnlySpike) {
  Matrix path(40, 2);
  for (std::size_t i = 0; i < 40; ++i) path(i, 0) = static_cast<double>(i) + (i >= 25 ? 50.0 : 0.0);
  const auto p = lipschitz_l2(path);
  EXPECT_EQ(p.spikes, (std::vector<std::size_t>{24}));
  double thr = 0;
  EXPECT_EQ(detect_spikes(p.values, &thr), p.spikes);
  EXPECT_DOUBLE_EQ(thr, p.spike_threshold);
}

TEST(Lipschitz, CosineScaleInvarianceAndRightAngle) {
  Matrix scaled(5, 3);
  for (std::size_t i = 0; i < 5; ++i) {
    scaled(i, 0) = 1.0 + static_cast<double>(i);
    scaled(i, 1) = 2.0 * (1.0 + static_cast<double>(i));
  }
  for (double v : lipschitz_cosine(scaled).values) EXPECT_NEAR(v, 0.0, 1e-15);
  const auto right = lipschitz_cosine(Matrix::from_rows({{1, 0}, {0, 2}, {0, 5}}));
  EXPECT_NEAR(right.values[0], 1.0, 1e-15);
  EXPECT_NEAR(right.distance_from_start.front(), 0.0, 1e-15);
  for (double v : right.distance_from_start) EXPECT_GE(v, 0.0);
  EXPECT_GEOTAX_ERROR(lipschitz_cosine(Matrix::from_rows({{1, 0}, {0, 0}, {1, 1}})), ErrorCode::ZeroNormRow);
}

TEST(Lipschitz, CosineProfileIndependentOfAmbientDimension) {
  const auto small = lipschitz_cosine(angular_path(16, 0));
  const auto large = lipschitz_cosine(angular_path(4096, 2000));
  ASSERT_EQ(small.values.size(), large.values.size());
  for (std::size_t i = 0; i < small.values.size(); ++i) EXPECT_NEAR(small.values[i], large.values[i], 1e-9);
}

TEST(Spikes, Cases) {
  EXPECT_TRUE(detect_spikes(std::vector<double>(50, 2.0)).empty());
  std::vector<double> v(101, 0.1);
  v[37] = 9.0;
  EXPECT_EQ(detect_spikes(v), (std::vector<std::size_t>{37}));
  EXPECT_GEOTAX_ERROR(detect_spikes(std::vector<double>{1.0, 2.0}), ErrorCode::TooShort);
}

TEST(Summaries, PairMeansAndGap) {
  LipschitzProfile a, b;
  a.mean = 1.0;
  b.mean = 3.0;
  const std::vector<LipschitzProfile> pairs = {a, b};
  EXPECT_DOUBLE_EQ(mean_of_pair_means(pairs), 2.0);
  const std::vector<double> models = {0.02, 0.026, 60.0};
  EXPECT_DOUBLE_EQ(gap_statistic(models), 3000.0);
}

TEST(Pca, PlanarArcAndSvg) {
  Matrix arc(60, 5);
  const Matrix q = random_orthogonal(5, 9);
  for (std::size_t i = 0; i < 60; ++i) {
    const double t = std::numbers::pi * static_cast<double>(i) / 59.0;
    const double p[5] = {3 * std::cos(t), 3 * std::sin(t), 0, 0, 0};
    for (std::size_t j = 0; j < 5; ++j) {
      double v = 0;
      for (std::size_t k = 0; k < 5; ++k) v += p[k] * q(k, j);
      arc(i, j) = v;
    }
  }
  const auto pca = pca_trajectory(arc, 3);
  EXPECT_GT(pca.explained_variance_ratio[0] + pca.explained_variance_ratio[1], 0.99);
  const auto svg = svg_polyline(pca.scores, 480, 480, "arc");
  EXPECT_EQ(svg, svg_polyline(pca_trajectory(arc, 3).scores, 480, 480, "arc"));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_GEOTAX_ERROR(pca_trajectory(gaussian(10, 2, 1), 3), ErrorCode::RankDeficient);
}

TEST(Output, ProfileCsv) {
  const auto p = lipschitz_l2(Matrix::from_rows({{0.0}, {1.0}, {3.0}}));
  EXPECT_EQ(profile_csv(p).rfind("step,L\n0,1", 0), 0u);
}
