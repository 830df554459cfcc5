#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "geotax/matrix.hpp"
#include "geotax/rng.hpp"
#include "geotax/sequence.hpp"

namespace geotax::dynamics {

enum class System { Waveform, Oscillator, Lorenz };

const char* to_string(System system);

struct OscillatorParams {
  double amplitude = 1.0;
  double gamma = 0.0;
  double omega = 0.0;
  double phi = 0.0;
};

// Parameter boxes for the oscillator sampler. Full covers the training
// distribution; the A/B tracks give the two endpoint regimes of an
// interpolation walk.
enum class OscillatorTrack { Full, WalkA, WalkB };

OscillatorParams sample_oscillator(Rng& rng, OscillatorTrack track = OscillatorTrack::Full);

// T x m samples at interval dt.
struct Trajectory {
  Matrix values;
  double dt = 0.0;
  System system = System::Waveform;

  std::size_t length() const noexcept { return values.rows(); }
  std::size_t channels() const noexcept { return values.cols(); }
};

struct GlobalRange {
  std::vector<double> min;
  std::vector<double> max;
};

inline constexpr std::size_t kDefaultLength = 512;
inline constexpr double kDefaultSpan = 4.0;

// x(t) = A e^{-gamma t} cos(omega t + phi) at t_i = i * span / T.
Trajectory gen_oscillator(const OscillatorParams& p, std::size_t length = kDefaultLength,
                          double span = kDefaultSpan);

struct LorenzParams {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
  double dt = 0.01;
  std::size_t transient = 1000;
};

using LorenzState = std::array<double, 3>;

LorenzState lorenz_rk4_step(const LorenzState& s, const LorenzParams& p);

// Integrates from the given state, discards p.transient steps, then records
// `length` states. Throws BlowUp when any coordinate exceeds 1e6.
Trajectory integrate_lorenz(LorenzState start, std::size_t length, const LorenzParams& p);

// Random start near (1, 1, 1) drawn from the seed.
Trajectory gen_lorenz(const SeedSpec& seed, std::size_t length, const LorenzParams& p = {});

// Two trajectories whose post-transient start states differ by `offset`
// along a random unit direction.
std::pair<Trajectory, Trajectory> lorenz_twins(const SeedSpec& seed, std::size_t length,
                                               double offset = 1e-9,
                                               const LorenzParams& p = {});

// Sum of n cosines with A ~ U(0.5, 2), omega ~ U(2, 20), phi ~ U(0, 2 pi).
Trajectory gen_waveform(const SeedSpec& seed, std::size_t n_components,
                        std::size_t length = kDefaultLength, double span = kDefaultSpan);

struct WaveComponent {
  double amplitude;
  double omega;
  double phi;
};
Trajectory waveform(std::span<const WaveComponent> components, std::size_t length = kDefaultLength,
                    double span = kDefaultSpan);

// Per-channel min/max over every sample. Throws DegenerateRange when a
// channel is constant.
GlobalRange fit_global_range(std::span<const Trajectory> dataset);

inline constexpr std::size_t kDefaultBins = 256;

// bin = clamp(floor((v - min) / (max - min) * n_bins), 0, n_bins - 1).
// Multichannel trajectories are interleaved time-major (t0c0, t0c1, ...).
SymbolSequence discretize(const Trajectory& traj, const GlobalRange& range,
                          std::size_t n_bins = kDefaultBins);

// Bin centres; inverse of discretize up to half a bin width.
Trajectory undiscretize(const SymbolSequence& seq, const GlobalRange& range,
                        std::size_t n_bins = kDefaultBins, double dt = kDefaultSpan / kDefaultLength);

struct LleOptions {
  // Fit window ends once the mean log separation reaches log(saturation).
  double saturation = 1.0;
  // Separations are floored here before taking logs.
  double floor = 1e-300;
  // Leading samples skipped while the offset aligns with the unstable direction.
  std::size_t skip = 0;
  std::size_t min_window = 50;
};

struct LleResult {
  double lambda = 0.0;          // per unit time
  std::size_t window = 0;       // samples used in the fit
  std::vector<double> mean_log_separation;
};

// Least-squares slope of the (pair-averaged) log separation against time
// over the pre-saturation window. Throws SaturatedTooEarly.
LleResult estimate_lle(const Trajectory& a, const Trajectory& b, const LleOptions& opt = {});
LleResult estimate_lle(std::span<const std::pair<Trajectory, Trajectory>> pairs,
                       const LleOptions& opt = {});

struct ButterflyOptions {
  double z_threshold = 10.0;   // crossings count only above this height
  double min_mean_dwell = 10.0;
  std::size_t min_crossings = 4;
  double max_abs_x = 25.0;
  double max_abs_y = 30.0;
  double min_z = 0.0;
  double max_z = 55.0;
};

struct ButterflyResult {
  bool pass = false;
  bool lobes_ok = false;
  bool bounds_ok = false;
  std::size_t crossings = 0;
  double mean_dwell = 0.0;
  double left_fraction = 0.0;
  double max_abs_x = 0.0;
  double max_abs_y = 0.0;
  double min_z = 0.0;
  double max_z = 0.0;
};

// Two-lobe check: x changes sign with z above threshold, lobes are visited
// for more than a few samples at a time, and the state stays in the
// attractor envelope.
ButterflyResult butterfly_test(const Trajectory& traj, const ButterflyOptions& opt = {});

}  // namespace geotax::dynamics
