#include <gtest/gtest.h>

#include <cmath>

#include "geotax/mine.hpp"
#include "test_support.hpp"

using namespace geotax;
using namespace geotax::mine;
using geotax::testing::gaussian;

namespace {

double weighted_output(const Mlp& net, const Matrix& x, const Matrix& w) {
  const Matrix out = net.predict(x);
  double s = 0;
  for (std::size_t i = 0; i < out.data().size(); ++i) s += out.data()[i] * w.data()[i];
  return s;
}

double max_fd_error(const std::vector<std::size_t>& widths, std::uint64_t seed) {
  Mlp net(widths, {seed, "gradcheck"});
  const Matrix x = gaussian(6, widths.front(), seed, "gc-x");
  const Matrix w = gaussian(6, widths.back(), seed, "gc-w");
  Mlp::Tape tape;
  net.forward(x, 0.0, nullptr, tape);
  std::vector<double> grad;
  net.backward(tape, w, grad);

  Rng pick(seed, "gc-pick");
  double worst = 0;
  for (int probe = 0; probe < 10; ++probe) {
    const auto i = pick.below(net.parameter_count());
    const double orig = net.parameters()[i];
    const double h = 1e-6 * std::max(1.0, std::abs(orig));
    net.parameters()[i] = orig + h;
    const double up = weighted_output(net, x, w);
    net.parameters()[i] = orig - h;
    const double down = weighted_output(net, x, w);
    net.parameters()[i] = orig;
    const double fd = (up - down) / (2 * h);
    const double scale = std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
    worst = std::max(worst, std::abs(fd - grad[i]) / scale);
  }
  return worst;
}

struct Xor {
  Matrix x;
  std::vector<std::uint32_t> y;
};

Xor xor_fixture(std::size_t n, std::uint64_t seed) {
  // Equal blob counts and every point paired with its mirror image, so the
  // fixture carries no linear signal.
  Rng rng(seed, "xor");
  Xor f{Matrix(n, 2), std::vector<std::uint32_t>(n)};
  for (std::size_t i = 0; i + 1 < n; i += 2) {
    const bool a = (i / 2) % 2, b = (i / 4) % 2;
    f.x(i, 0) = (a ? 1.0 : -1.0) + 0.25 * rng.normal();
    f.x(i, 1) = (b ? 1.0 : -1.0) + 0.25 * rng.normal();
    f.x(i + 1, 0) = -f.x(i, 0);
    f.x(i + 1, 1) = -f.x(i, 1);
    f.y[i] = f.y[i + 1] = a != b;
  }
  return f;
}

}  // namespace

TEST(Gradient, MatchesFiniteDifferencesForEveryArchitecture) {
  const std::vector<MlpConfig> archs = {statistics_network(6), probe_two_layer(5), probe_three_layer(4),
                                        sanity_network(2)};
  for (const auto& cfg : archs) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed)
      EXPECT_LT(max_fd_error(cfg.widths, seed), 1e-4) << "widths[1]=" << cfg.widths[1];
  }
}

TEST(Gradient, DropoutMasksScaleSurvivors) {
  Mlp net({3, 50, 1}, {1, "drop"});
  const Matrix x = gaussian(4, 3, 2);
  Rng rng(3, "mask");
  Mlp::Tape tape;
  net.forward(x, 0.5, &rng, tape);
  for (double m : tape.masks[0].data()) EXPECT_TRUE(m == 0.0 || m == 2.0);
  Mlp::Tape plain;
  EXPECT_EQ(net.forward(x, 0.5, nullptr, plain), net.predict(x));
}

TEST(Mlp, ArchitecturesAndInit) {
  EXPECT_EQ(statistics_network(50).widths, (std::vector<std::size_t>{50, 256, 128, 1}));
  EXPECT_EQ(statistics_network(50).epochs, 500u);
  EXPECT_EQ(probe_three_layer(8).widths, (std::vector<std::size_t>{8, 512, 256, 64, 1}));
  const Mlp net({4, 3, 1}, {1, "init"});
  EXPECT_EQ(net.parameter_count(), 4u * 3 + 3 + 3 + 1);
  for (std::size_t i = 0; i < 15; ++i) EXPECT_LE(std::abs(net.parameters()[i]), 0.5);
  EXPECT_EQ(net, Mlp({4, 3, 1}, {1, "init"}));
}

TEST(Optimiser, AdamFirstStepAndClipping) {
  Adam adam(3, 0.01);
  std::vector<double> p = {1.0, 1.0, 1.0};
  adam.step(p, {5.0, -0.001, 0.0});
  EXPECT_NEAR(p[0], 0.99, 1e-9);
  EXPECT_NEAR(p[1], 1.01, 1e-5);
  EXPECT_EQ(p[2], 1.0);
  std::vector<double> g = {7.0, -7.0, 1.0};
  clip_elementwise(g, 5.0);
  EXPECT_EQ(g, (std::vector<double>{5.0, -5.0, 1.0}));
}

TEST(Optimiser, WeightDecaySkipsBiases) {
  Mlp net({2, 1}, {1, "wd"});
  std::vector<double> g(3, 0.0);
  add_weight_decay(net, 0.5, g);
  EXPECT_DOUBLE_EQ(g[0], 0.5 * net.parameters()[0]);
  EXPECT_DOUBLE_EQ(g[1], 0.5 * net.parameters()[1]);
  EXPECT_EQ(g[2], 0.0);
}

TEST(Regression, LearnsLinearMap) {
  const Matrix x = gaussian(256, 2, 4);
  Matrix y(256, 1);
  for (std::size_t i = 0; i < 256; ++i) y(i, 0) = 0.5 * x(i, 0) - x(i, 1);
  MlpConfig cfg;
  cfg.widths = {2, 16, 1};
  cfg.dropout = 0.0;
  cfg.lr = 1e-2;
  cfg.epochs = 200;
  cfg.batch = 32;
  const auto t = mlp_train_regression(x, y, cfg, {1, "reg"});
  EXPECT_LT(t.loss_trace.back(), 0.05 * t.loss_trace.front());
}

TEST(Dv, ZeroNetworkAndManualOracle) {
  Mlp net({2, 4, 1}, {1, "dv"});
  const Matrix x = gaussian(20, 1, 5);
  const Matrix z = gaussian(20, 1, 6);
  std::vector<std::size_t> perm(20);
  for (std::size_t i = 0; i < 20; ++i) perm[i] = (i + 3) % 20;

  Matrix joint(20, 2), marg(20, 2);
  for (std::size_t i = 0; i < 20; ++i) {
    joint(i, 0) = marg(i, 0) = x(i, 0);
    joint(i, 1) = z(i, 0);
    marg(i, 1) = z(perm[i], 0);
  }
  const Matrix tj = net.predict(joint), tm = net.predict(marg);
  double ej = 0, em = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    ej += tj(i, 0) / 20.0;
    em += std::exp(tm(i, 0)) / 20.0;
  }
  EXPECT_NEAR(dv_bound(net, x, z, perm), ej - std::log(em), 1e-12);

  std::fill(net.parameters().begin(), net.parameters().end(), 0.0);
  EXPECT_EQ(dv_bound(net, x, z, perm), 0.0);
}

TEST(Stats, ClosedFormsAndZscore) {
  EXPECT_EQ(gaussian_mi(0.0), 0.0);
  EXPECT_NEAR(gaussian_mi(0.9), -0.5 * std::log(0.19), 1e-15);
  EXPECT_EQ(sanity_tolerance(0.1), 0.15);
  EXPECT_NEAR(sanity_tolerance(gaussian_mi(0.9)), 0.3 * gaussian_mi(0.9), 1e-15);
  const Matrix z = zscore(Matrix::from_rows({{1, 5}, {3, 5}, {5, 5}}));
  EXPECT_NEAR(z(0, 0), -std::sqrt(1.5), 1e-12);
  EXPECT_EQ(z(1, 1), 0.0);
}

TEST(Calibration, ExcessAndNormalised) {
  MIEstimate e;
  e.mean = 3.0;
  apply_calibration(e, 2.5, 2.0);
  EXPECT_DOUBLE_EQ(e.excess, 0.5);
  EXPECT_DOUBLE_EQ(e.normalized, 0.25);
}

TEST(Mine, DetectsStrongDependenceAtSmallScale) {
  auto cfg = sanity_mine();
  cfg.net.epochs = 60;
  const std::vector<double> rhos = {0.0, 0.9};
  const std::vector<std::uint64_t> seeds = {320};
  const auto cases = sanity_suite(rhos, 600, cfg, seeds);
  ASSERT_EQ(cases.size(), 2u);
  EXPECT_LT(cases[0].estimate.mean, 0.15);
  EXPECT_GT(cases[1].estimate.mean, 0.4);
  EXPECT_TRUE(cases[1].improved);
}

TEST(Features, DnaAndProtein) {
  const auto f = dna_features(dna("ACGT"));
  ASSERT_EQ(f.size(), kDnaFeatureCount);
  EXPECT_DOUBLE_EQ(f[0], 0.5);
  EXPECT_DOUBLE_EQ(f[1 + 1], 1.0 / 3);   // AC
  EXPECT_DOUBLE_EQ(f[1 + 6], 1.0 / 3);   // CG
  EXPECT_DOUBLE_EQ(f[1 + 11], 1.0 / 3);  // GT
  EXPECT_DOUBLE_EQ(f[1 + 0], 0.0);

  const auto p = protein_features(SymbolSequence::from_string("IIKD", Alphabet::protein()), 1);
  ASSERT_EQ(p.size(), kProteinFeatureCount);
  EXPECT_DOUBLE_EQ(p[7], 0.5);          // I
  EXPECT_DOUBLE_EQ(p[20], 0.004);       // length / 1000
  EXPECT_DOUBLE_EQ(p[21], 0.0);         // K and D cancel
  EXPECT_DOUBLE_EQ(p[22], (4.5 + 4.5 - 3.9 - 3.5) / 4);
  EXPECT_EQ(p[23], 0.0);
  EXPECT_EQ(p[24], 1.0);
  EXPECT_DOUBLE_EQ(kyte_doolittle('R'), -4.5);
}

TEST(Probe, XorSeparatesNonlinearFromLinear) {
  const auto f = xor_fixture(400, 7);
  const auto lin = mlp_probe_cv(f.x, f.y, ProbeArch::Linear, 5, {1, "probe"});
  const auto mlp = mlp_probe_cv(f.x, f.y, ProbeArch::TwoLayer, 5, {1, "probe"});
  EXPECT_NEAR(lin.mean, 0.5, 0.08);
  EXPECT_GT(mlp.mean, 0.9);
}

TEST(Probe, SeparableAndShuffled) {
  std::vector<std::uint32_t> y(300);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = i % 2;
  Matrix x = gaussian(300, 4, 8);
  for (std::size_t i = 0; i < 300; ++i) x(i, 1) += y[i] ? 3.0 : -3.0;
  EXPECT_GT(mlp_probe_cv(x, y, ProbeArch::Linear, 5, {1, "p"}).mean, 0.95);
  auto shuffled = y;
  Rng(9, "shuffle").shuffle(shuffled);
  EXPECT_NEAR(mlp_probe_cv(x, shuffled, ProbeArch::Linear, 5, {1, "p"}).mean, 0.5, 0.08);
  EXPECT_GEOTAX_ERROR(mlp_probe_cv(x, std::vector<std::uint32_t>(300, 0), ProbeArch::TwoLayer, 5, {1, "p"}),
                      ErrorCode::SingleClass);
}
