#include <gtest/gtest.h>

#include <cmath>

#include "geotax/perturb.hpp"
#include "test_support.hpp"

using namespace geotax;
using namespace geotax::perturb;

namespace {

SymbolSequence random_dna(std::size_t n, std::uint64_t seed) {
  Rng rng(seed, "dna");
  SymbolSequence s{Alphabet::dna(), std::vector<std::uint16_t>(n)};
  for (auto& b : s.symbols) b = static_cast<std::uint16_t>(rng.below(4));
  return s;
}

PerturbationSpec spec_with(Kind kind, double rate, double magnitude = 1.0, std::uint64_t seed = 320) {
  PerturbationSpec s;
  s.kind = kind;
  s.rate = rate;
  s.magnitude = magnitude;
  s.seed = {seed, "perturb"};
  return s;
}

}  // namespace

TEST(Positions, CeilWithGuard) {
  EXPECT_EQ(positions_to_change(0.05, 1000), 50u);
  EXPECT_EQ(positions_to_change(0.01, 512), 6u);
  EXPECT_EQ(positions_to_change(0.0, 512), 0u);
  EXPECT_EQ(positions_to_change(1.0, 17), 17u);
  EXPECT_EQ(positions_to_change(0.1, 3), 1u);
  EXPECT_GEOTAX_ERROR(positions_to_change(1.5, 10), ErrorCode::InvalidArgument);
}

TEST(Substitute, ExactHammingCount) {
  for (double rate : {0.0, 0.01, 0.05, 0.1, 0.37, 1.0}) {
    const auto s = random_dna(1000, 1);
    const auto p = substitute(s, spec_with(Kind::Substitute, rate));
    EXPECT_EQ(hamming(s, p), positions_to_change(rate, 1000)) << rate;
    EXPECT_EQ(input_delta(s, p), static_cast<double>(hamming(s, p)));
  }
}

TEST(Substitute, ProteinAndTinyAlphabets) {
  const auto prot = SymbolSequence::from_string("ACDEFGHIKLMNPQRSTVWY", Alphabet::protein());
  EXPECT_EQ(hamming(prot, substitute(prot, spec_with(Kind::Substitute, 0.5))), 10u);
  SymbolSequence unary{Alphabet::bins(1), {0, 0, 0}};
  EXPECT_GEOTAX_ERROR(substitute(unary, spec_with(Kind::Substitute, 0.5)), ErrorCode::AlphabetTooSmall);
}

TEST(Substitute, DeterministicPerSeed) {
  const auto s = random_dna(500, 2);
  EXPECT_EQ(substitute(s, spec_with(Kind::Substitute, 0.1)), substitute(s, spec_with(Kind::Substitute, 0.1)));
  EXPECT_NE(substitute(s, spec_with(Kind::Substitute, 0.1, 1.0, 1)),
            substitute(s, spec_with(Kind::Substitute, 0.1, 1.0, 2)));
}

TEST(ReverseComplement, ExamplesAndInvolution) {
  EXPECT_EQ(reverse_complement(dna("AACG")).to_string(), "CGTT");
  EXPECT_EQ(reverse_complement(dna("")).size(), 0u);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = random_dna(101, seed);
    EXPECT_EQ(reverse_complement(reverse_complement(s)), s);
  }
  const auto prot = SymbolSequence::from_string("ACD", Alphabet::protein());
  EXPECT_GEOTAX_ERROR(reverse_complement(prot), ErrorCode::BadBase);
}

TEST(TimeReverse, InvolutionOnSequencesAndTrajectories) {
  const auto s = random_dna(64, 3);
  EXPECT_EQ(time_reverse(time_reverse(s)), s);
  EXPECT_EQ(time_reverse(dna("ACGG")).to_string(), "GGCA");
  const auto t = dynamics::gen_lorenz({1, "rev"}, 100);
  EXPECT_EQ(time_reverse(time_reverse(t)).values, t.values);
  EXPECT_EQ(time_reverse(t).values(0, 2), t.values(99, 2));
}

TEST(ValueNoise, TouchesExactlyTheChosenSteps) {
  const auto t = dynamics::gen_lorenz({1, "noise"}, 1000);
  const auto r = dynamics::fit_global_range({&t, 1});
  const auto p = value_noise(t, r, spec_with(Kind::ValueNoise, 0.05, 0.01));
  std::size_t changed = 0;
  for (std::size_t i = 0; i < t.length(); ++i) {
    bool any = false;
    for (std::size_t c = 0; c < 3; ++c) any |= t.values(i, c) != p.values(i, c);
    changed += any;
  }
  EXPECT_EQ(changed, 50u);
}

TEST(ValueNoise, ScaleIsFractionOfGlobalRange) {
  Matrix v(20000, 1);
  for (std::size_t i = 0; i < v.rows(); ++i) v(i, 0) = static_cast<double>(i % 2) * 4.0;
  dynamics::Trajectory t{v, 0.01, dynamics::System::Waveform};
  const dynamics::GlobalRange r{{0.0}, {4.0}};
  const auto p = value_noise(t, r, spec_with(Kind::ValueNoise, 1.0, 0.1));
  double ss = 0;
  for (std::size_t i = 0; i < v.rows(); ++i) ss += std::pow(p.values(i, 0) - t.values(i, 0), 2);
  const double sd = std::sqrt(ss / static_cast<double>(v.rows()));
  EXPECT_NEAR(sd, 0.4, 0.4 * 0.03);
}

TEST(ValueNoise, RangeChannelMismatch) {
  const auto t = dynamics::gen_lorenz({1, "noise"}, 10);
  const dynamics::GlobalRange r{{0.0}, {1.0}};
  EXPECT_GEOTAX_ERROR(value_noise(t, r, spec_with(Kind::ValueNoise, 0.1)), ErrorCode::DimensionMismatch);
}

TEST(Pad, PreservesSignalAtOffset) {
  const auto s = random_dna(100, 4);
  for (auto side : {PadSide::Left, PadSide::Right, PadSide::Both}) {
    const auto p = pad_random(s, 251, side, {1, "pad"});
    ASSERT_EQ(p.sequence.size(), 251u);
    const std::vector<std::uint16_t> kept(p.sequence.symbols.begin() + static_cast<long>(p.offset),
                                          p.sequence.symbols.begin() + static_cast<long>(p.offset + 100));
    EXPECT_EQ(kept, s.symbols);
  }
  EXPECT_EQ(pad_random(s, 251, PadSide::Left, {1, "pad"}).offset, 151u);
  EXPECT_EQ(pad_random(s, 251, PadSide::Right, {1, "pad"}).offset, 0u);
  EXPECT_EQ(pad_random(s, 251, PadSide::Both, {1, "pad"}).offset, 75u);
  EXPECT_EQ(pad_random(s, 100, PadSide::Both, {1, "pad"}).sequence, s);
  EXPECT_GEOTAX_ERROR(pad_random(s, 99, PadSide::Both, {1, "pad"}), ErrorCode::TargetTooShort);
}

TEST(Spec, ConfigRoundTripAndValidation) {
  const auto s = spec_with(Kind::ReverseComplement, 0.125, 0.3, 77);
  const auto back = PerturbationSpec::from_config(s.to_config());
  EXPECT_EQ(back.kind, s.kind);
  EXPECT_EQ(back.rate, s.rate);
  EXPECT_EQ(back.magnitude, s.magnitude);
  EXPECT_EQ(back.seed.seed, 77u);
  EXPECT_EQ(back.seed.stream, "perturb");
  auto cfg = s.to_config();
  cfg.set("perturb.rate", "1.5");
  EXPECT_GEOTAX_ERROR(PerturbationSpec::from_config(cfg), ErrorCode::ConfigError);
  cfg.set("perturb.rate", "0.1");
  cfg.set("perturb.kind", "scramble");
  EXPECT_GEOTAX_ERROR(PerturbationSpec::from_config(cfg), ErrorCode::ConfigError);
}

TEST(InputDelta, TrajectoryEuclidean) {
  dynamics::Trajectory a{Matrix::from_rows({{0, 0}, {0, 0}}), 0.1, dynamics::System::Waveform};
  dynamics::Trajectory b{Matrix::from_rows({{3, 0}, {0, 4}}), 0.1, dynamics::System::Waveform};
  EXPECT_DOUBLE_EQ(input_delta(a, b), 5.0);
}
