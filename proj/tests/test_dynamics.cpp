#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "geotax/dynamics.hpp"
#include "geotax/perturb.hpp"
#include "test_support.hpp"

using namespace geotax;
using namespace geotax::dynamics;

namespace {

// Benettin renormalisation along a single long run.
double benettin_lle(std::size_t steps) {
  LorenzParams p;
  LorenzState a{1.1, 0.9, 1.3};
  for (int i = 0; i < 2000; ++i) a = lorenz_rk4_step(a, p);
  const double d0 = 1e-8;
  LorenzState b = a;
  b[0] += d0;
  double sum = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    a = lorenz_rk4_step(a, p);
    b = lorenz_rk4_step(b, p);
    double d = 0.0;
    for (int c = 0; c < 3; ++c) d += (a[c] - b[c]) * (a[c] - b[c]);
    d = std::sqrt(d);
    sum += std::log(d / d0);
    for (int c = 0; c < 3; ++c) b[c] = a[c] + (b[c] - a[c]) * d0 / d;
  }
  return sum / (static_cast<double>(steps) * p.dt);
}

Trajectory constant_trajectory(std::size_t n, double v) {
  Trajectory t{Matrix(n, 3, v), 0.01, System::Lorenz};
  return t;
}

}  // namespace

TEST(Oscillator, ClosedForms) {
  EXPECT_EQ(gen_oscillator({1, 0, 0, 0}).values, Matrix(kDefaultLength, 1, 1.0));
  EXPECT_NEAR(gen_oscillator({1, 0, 1, std::numbers::pi / 2}).values(0, 0), 0.0, 1e-15);
  // t = 1 is sample 128 with the default span of 4 over 512 samples.
  EXPECT_NEAR(gen_oscillator({1, 1, 2 * std::numbers::pi, 0}).values(128, 0), std::exp(-1.0), 1e-12);
}

TEST(Oscillator, SamplerStaysInBoxes) {
  Rng rng(1, "osc");
  for (int i = 0; i < 200; ++i) {
    const auto p = sample_oscillator(rng);
    EXPECT_GE(p.amplitude, 0.5);
    EXPECT_LT(p.amplitude, 2.0);
    EXPECT_GE(p.phi, 0.0);
    EXPECT_LT(p.phi, 2 * std::numbers::pi);
  }
}

TEST(Lorenz, Deterministic) {
  EXPECT_EQ(gen_lorenz({5, "x"}, 300).values, gen_lorenz({5, "x"}, 300).values);
  EXPECT_NE(gen_lorenz({5, "x"}, 300).values, gen_lorenz({6, "x"}, 300).values);
}

TEST(Lorenz, LongRunStaysInAttractorBounds) {
  const auto t = gen_lorenz({320, "bounds"}, 20000);
  for (std::size_t i = 0; i < t.length(); ++i) {
    ASSERT_LT(std::abs(t.values(i, 0)), 25.0);
    ASSERT_LT(std::abs(t.values(i, 1)), 30.0);
    ASSERT_GT(t.values(i, 2), 0.0);
    ASSERT_LT(t.values(i, 2), 55.0);
  }
}

TEST(Lorenz, BlowUpDetected) {
  EXPECT_GEOTAX_ERROR(integrate_lorenz({1e5, 1e5, 0}, 100, {}), ErrorCode::BlowUp);
  LorenzParams p;
  p.dt = 0.5;
  EXPECT_GEOTAX_ERROR(integrate_lorenz({1, 1, 1}, 100, p), ErrorCode::InvalidArgument);
}

TEST(Lorenz, TwinsDivergeExponentiallyThenSaturate) {
  const auto [a, b] = lorenz_twins({320, "twins"}, 4000);
  auto sep = [&](std::size_t t) {
    double s = 0;
    for (int c = 0; c < 3; ++c) s += std::pow(a.values(t, c) - b.values(t, c), 2);
    return std::sqrt(s);
  };
  EXPECT_LT(sep(0), 1e-8);
  EXPECT_GT(sep(1500), 1e3 * sep(0));
  EXPECT_LT(sep(3999), 60.0);
}

TEST(Waveform, SingleComponentIsUndampedOscillator) {
  const WaveComponent w{1.5, 3.0, 0.4};
  EXPECT_EQ(waveform({&w, 1}).values, gen_oscillator({1.5, 0, 3.0, 0.4}).values);
}

TEST(Waveform, FullPeriodMeanNearZero) {
  const std::vector<WaveComponent> ws = {{1.0, 2 * std::numbers::pi, 0.3}, {0.7, 4 * std::numbers::pi, 1.1}};
  const auto t = waveform(ws);
  double m = 0;
  for (double v : t.values.data()) m += v / static_cast<double>(t.length());
  EXPECT_NEAR(m, 0.0, 0.05);
}

TEST(Waveform, Deterministic) {
  EXPECT_EQ(gen_waveform({3, "w"}, 4).values, gen_waveform({3, "w"}, 4).values);
}

TEST(Range, ErrorsEnvelopeAndOrderInvariance) {
  const auto c = gen_oscillator({1, 0, 0, 0});
  EXPECT_GEOTAX_ERROR(fit_global_range({&c, 1}), ErrorCode::DegenerateRange);
  const std::vector<Trajectory> ds = {gen_oscillator({1, 0, 3, 0}), gen_oscillator({2, 0, 5, 1})};
  const auto r = fit_global_range(ds);
  EXPECT_NEAR(r.max[0], 2.0, 1e-3);
  EXPECT_NEAR(r.min[0], -2.0, 1e-2);
  const std::vector<Trajectory> rev = {ds[1], ds[0]};
  const auto r2 = fit_global_range(rev);
  EXPECT_EQ(r.min, r2.min);
  EXPECT_EQ(r.max, r2.max);
}

TEST(Discretize, BinConvention) {
  const GlobalRange r{{0.0}, {1.0}};
  Trajectory t{Matrix::from_rows({{0.0}, {1.0}, {0.5}, {-3.0}, {7.0}}), 0.01, System::Waveform};
  const auto s = discretize(t, r);
  EXPECT_EQ(s.symbols, (std::vector<std::uint16_t>{0, 255, 128, 0, 255}));
}

TEST(Discretize, RoundTripWithinHalfBin) {
  const auto t = gen_lorenz({1, "disc"}, 500);
  const auto r = fit_global_range({&t, 1});
  const auto back = undiscretize(discretize(t, r), r);
  for (std::size_t i = 0; i < t.length(); ++i)
    for (std::size_t c = 0; c < 3; ++c)
      EXPECT_LE(std::abs(back.values(i, c) - t.values(i, c)), (r.max[c] - r.min[c]) / 512.0 + 1e-12);
}

TEST(Discretize, InterleavesChannelsTimeMajor) {
  const GlobalRange r{{0.0, 0.0}, {1.0, 1.0}};
  Trajectory t{Matrix::from_rows({{0.0, 0.99}, {0.5, 0.25}}), 0.01, System::Waveform};
  EXPECT_EQ(discretize(t, r, 4).symbols, (std::vector<std::uint16_t>{0, 3, 2, 1}));
}

TEST(Lle, IdenticalTrajectoriesGiveZero) {
  Trajectory a = gen_oscillator({1, 0.2, 3, 0});
  Trajectory b = a;
  for (double& v : b.values.data()) v += 1e-6;
  EXPECT_NEAR(estimate_lle(a, b).lambda, 0.0, 1e-9);
}

TEST(Lle, LorenzWithinTenPercentOfBenettin) {
  const double oracle = benettin_lle(200000);
  EXPECT_NEAR(oracle, 0.9, 0.03);
  std::vector<std::pair<Trajectory, Trajectory>> pairs;
  for (std::uint64_t i = 0; i < 10; ++i) pairs.push_back(lorenz_twins({320 + i, "lle"}, 3000));
  LleOptions opt;
  opt.skip = 200;
  const double lambda = estimate_lle(pairs, opt).lambda;
  EXPECT_LT(std::abs(lambda - oracle) / oracle, 0.10) << lambda << " vs " << oracle;
}

TEST(Lle, DampedTwinsContractAndReversalFlipsSign) {
  const auto a = gen_oscillator({1.0, 0.5, 0.0, 0.0});
  const auto b = gen_oscillator({1.0 + 1e-6, 0.5, 0.0, 0.0});
  const double fwd = estimate_lle(a, b).lambda;
  EXPECT_NEAR(fwd, -0.5, 1e-6);
  const double back = estimate_lle(perturb::time_reverse(a), perturb::time_reverse(b)).lambda;
  EXPECT_NEAR(back, -fwd, 1e-6);
  const auto c = gen_oscillator({1.0, 0.5, 2 * std::numbers::pi, 0.0});
  const auto d = gen_oscillator({1.0 + 1e-6, 0.5, 2 * std::numbers::pi, 0.0});
  EXPECT_LT(estimate_lle(c, d).lambda, 0.0);
}

TEST(Lle, SaturatedTooEarly) {
  const auto a = gen_oscillator({1, 0, 3, 0});
  const auto b = gen_oscillator({5, 0, 3, 0});
  EXPECT_GEOTAX_ERROR(estimate_lle(a, b), ErrorCode::SaturatedTooEarly);
}

TEST(Butterfly, ReferenceLorenzPassesFixturesFail) {
  const auto ref = butterfly_test(gen_lorenz({320, "butterfly"}, 5000));
  EXPECT_TRUE(ref.pass);
  EXPECT_GE(ref.crossings, 4u);
  EXPECT_FALSE(butterfly_test(constant_trajectory(5000, 1.0)).pass);
  Rng rng(3, "noise");
  Trajectory noise{Matrix(5000, 3), 0.01, System::Lorenz};
  for (std::size_t i = 0; i < 5000; ++i) {
    noise.values(i, 0) = rng.uniform(-20, 20);
    noise.values(i, 1) = rng.uniform(-20, 20);
    noise.values(i, 2) = rng.uniform(5, 45);
  }
  const auto nr = butterfly_test(noise);
  EXPECT_TRUE(nr.bounds_ok);
  EXPECT_FALSE(nr.pass);
}
