#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "geotax/dynamics.hpp"
#include "geotax/kv.hpp"
#include "geotax/rng.hpp"
#include "geotax/sequence.hpp"

namespace geotax::perturb {

enum class Kind { ValueNoise, TimeReverse, Substitute, ReverseComplement, Reverse, Pad };

const char* to_string(Kind kind);
Kind kind_from_string(const std::string& name);

struct PerturbationSpec {
  Kind kind = Kind::ValueNoise;
  double rate = 0.01;       // fraction of positions
  double magnitude = 1.0;   // noise sd as a fraction of the channel's global range
  SeedSpec seed;

  // Keys: kind, rate, magnitude, seed, stream (under an optional prefix).
  KvConfig to_config(const std::string& prefix = "perturb.") const;
  static PerturbationSpec from_config(const KvConfig& cfg, const std::string& prefix = "perturb.");
};

// ceil(rate * length), with a small guard so 0.05 * 1000 stays 50.
std::size_t positions_to_change(double rate, std::size_t length);

// Adds N(0, (magnitude * range_c)^2) noise to every channel at exactly
// positions_to_change(rate, T) time steps chosen without replacement.
dynamics::Trajectory value_noise(const dynamics::Trajectory& traj, const dynamics::GlobalRange& range,
                                 const PerturbationSpec& spec);

// Replaces positions_to_change(rate, L) positions with a uniformly drawn
// different symbol. Throws AlphabetTooSmall for alphabets of size < 2.
SymbolSequence substitute(const SymbolSequence& seq, const PerturbationSpec& spec);

// Throws BadBase for non-DNA input.
SymbolSequence reverse_complement(const SymbolSequence& seq);

SymbolSequence time_reverse(const SymbolSequence& seq);
dynamics::Trajectory time_reverse(const dynamics::Trajectory& traj);

enum class PadSide { Left, Right, Both };

struct Padded {
  SymbolSequence sequence;
  std::size_t offset = 0;  // start of the preserved signal
};

// Embeds seq in i.i.d. uniform symbols up to target_len. Both splits the
// padding with the extra symbol on the right. Throws TargetTooShort.
Padded pad_random(const SymbolSequence& seq, std::size_t target_len, PadSide side,
                  const SeedSpec& seed);

// Input-space magnitude of a perturbation: Euclidean distance between the
// clean and perturbed trajectories, or Hamming distance for sequences.
double input_delta(const dynamics::Trajectory& clean, const dynamics::Trajectory& pert);
double input_delta(const SymbolSequence& clean, const SymbolSequence& pert);

}  // namespace geotax::perturb
