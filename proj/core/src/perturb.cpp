#include "geotax/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "geotax/error.hpp"

namespace geotax::perturb {

const char* to_string(Kind kind) {
  switch (kind) {
    case Kind::ValueNoise: return "value_noise";
    case Kind::TimeReverse: return "time_reverse";
    case Kind::Substitute: return "substitute";
    case Kind::ReverseComplement: return "reverse_complement";
    case Kind::Reverse: return "reverse";
    case Kind::Pad: return "pad";
  }
  return "unknown";
}

Kind kind_from_string(const std::string& name) {
  for (Kind k : {Kind::ValueNoise, Kind::TimeReverse, Kind::Substitute, Kind::ReverseComplement,
                 Kind::Reverse, Kind::Pad}) {
    if (name == to_string(k)) return k;
  }
  fail(ErrorCode::ConfigError, "unknown perturbation kind '" + name + "'");
}

KvConfig PerturbationSpec::to_config(const std::string& prefix) const {
  KvConfig cfg;
  char buf[32];
  cfg.set(prefix + "kind", to_string(kind));
  std::snprintf(buf, sizeof buf, "%.17g", rate);
  cfg.set(prefix + "rate", buf);
  std::snprintf(buf, sizeof buf, "%.17g", magnitude);
  cfg.set(prefix + "magnitude", buf);
  cfg.set(prefix + "seed", std::to_string(seed.seed));
  cfg.set(prefix + "stream", seed.stream);
  return cfg;
}

PerturbationSpec PerturbationSpec::from_config(const KvConfig& cfg, const std::string& prefix) {
  PerturbationSpec spec;
  spec.kind = kind_from_string(cfg.require(prefix + "kind"));
  spec.rate = cfg.get_double(prefix + "rate", spec.rate);
  spec.magnitude = cfg.get_double(prefix + "magnitude", spec.magnitude);
  spec.seed.seed = cfg.get_u64(prefix + "seed", spec.seed.seed);
  spec.seed.stream = cfg.get_string(prefix + "stream", spec.seed.stream);
  if (spec.rate < 0.0 || spec.rate > 1.0)
    fail(ErrorCode::ConfigError, "key '" + prefix + "rate' must lie in [0, 1]");
  if (spec.magnitude < 0.0)
    fail(ErrorCode::ConfigError, "key '" + prefix + "magnitude' must be nonnegative");
  return spec;
}

std::size_t positions_to_change(double rate, std::size_t length) {
  require(rate >= 0.0 && rate <= 1.0, ErrorCode::InvalidArgument, "rate must lie in [0, 1]");
  const double raw = std::ceil(rate * static_cast<double>(length) - 1e-9);
  return std::min(length, static_cast<std::size_t>(std::max(raw, 0.0)));
}

dynamics::Trajectory value_noise(const dynamics::Trajectory& traj,
                                 const dynamics::GlobalRange& range,
                                 const PerturbationSpec& spec) {
  require(range.min.size() == traj.channels() && range.max.size() == traj.channels(),
          ErrorCode::DimensionMismatch, "range channel count differs from trajectory");
  Rng rng(spec.seed);
  dynamics::Trajectory out = traj;
  const std::size_t count = positions_to_change(spec.rate, traj.length());
  for (std::size_t t : rng.sample_without_replacement(traj.length(), count)) {
    for (std::size_t c = 0; c < traj.channels(); ++c)
      out.values(t, c) += spec.magnitude * (range.max[c] - range.min[c]) * rng.normal();
  }
  return out;
}

SymbolSequence substitute(const SymbolSequence& seq, const PerturbationSpec& spec) {
  const std::size_t a = seq.alphabet.size();
  require(a >= 2, ErrorCode::AlphabetTooSmall, "substitution needs an alphabet of size >= 2");
  Rng rng(spec.seed);
  SymbolSequence out = seq;
  const std::size_t count = positions_to_change(spec.rate, seq.size());
  for (std::size_t pos : rng.sample_without_replacement(seq.size(), count)) {
    const std::uint64_t shift = 1 + rng.below(a - 1);
    out.symbols[pos] = static_cast<std::uint16_t>((seq.symbols[pos] + shift) % a);
  }
  return out;
}

SymbolSequence reverse_complement(const SymbolSequence& seq) {
  require(seq.alphabet.kind() == AlphabetKind::Dna, ErrorCode::BadBase,
          "reverse complement needs a DNA sequence");
  SymbolSequence out{seq.alphabet, std::vector<std::uint16_t>(seq.size())};
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto b = seq.symbols[seq.size() - 1 - i];
    require(b < 4, ErrorCode::BadBase, "base code out of range");
    out.symbols[i] = static_cast<std::uint16_t>(3 - b);
  }
  return out;
}

SymbolSequence time_reverse(const SymbolSequence& seq) {
  SymbolSequence out = seq;
  std::reverse(out.symbols.begin(), out.symbols.end());
  return out;
}

dynamics::Trajectory time_reverse(const dynamics::Trajectory& traj) {
  dynamics::Trajectory out = traj;
  const std::size_t t_len = traj.length();
  for (std::size_t t = 0; t < t_len; ++t)
    for (std::size_t c = 0; c < traj.channels(); ++c)
      out.values(t, c) = traj.values(t_len - 1 - t, c);
  return out;
}

Padded pad_random(const SymbolSequence& seq, std::size_t target_len, PadSide side,
                  const SeedSpec& seed) {
  if (target_len < seq.size()) {
    fail(ErrorCode::TargetTooShort, "target length " + std::to_string(target_len) +
                                        " is shorter than the sequence (" +
                                        std::to_string(seq.size()) + ")");
  }
  const std::size_t extra = target_len - seq.size();
  std::size_t left = 0;
  if (side == PadSide::Left) left = extra;
  if (side == PadSide::Both) left = extra / 2;
  Rng rng(seed);
  const std::size_t a = seq.alphabet.size();
  Padded out{SymbolSequence{seq.alphabet, {}}, left};
  out.sequence.symbols.reserve(target_len);
  for (std::size_t i = 0; i < left; ++i)
    out.sequence.symbols.push_back(static_cast<std::uint16_t>(rng.below(a)));
  out.sequence.symbols.insert(out.sequence.symbols.end(), seq.symbols.begin(), seq.symbols.end());
  for (std::size_t i = left; i < extra; ++i)
    out.sequence.symbols.push_back(static_cast<std::uint16_t>(rng.below(a)));
  return out;
}

double input_delta(const dynamics::Trajectory& clean, const dynamics::Trajectory& pert) {
  require(clean.length() == pert.length() && clean.channels() == pert.channels(),
          ErrorCode::ShapeMismatch, "trajectories differ in shape");
  return frobenius_norm(clean.values - pert.values);
}

double input_delta(const SymbolSequence& clean, const SymbolSequence& pert) {
  return static_cast<double>(hamming(clean, pert));
}

}  // namespace geotax::perturb
