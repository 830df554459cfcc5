#include "geotax/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "geotax/error.hpp"

namespace geotax::dynamics {

namespace {

constexpr double kBlowUp = 1e6;

double time_at(std::size_t i, std::size_t length, double span) {
  return span * static_cast<double>(i) / static_cast<double>(length);
}

void check_finite_bounded(const LorenzState& s) {
  for (double v : s) {
    if (!std::isfinite(v) || std::abs(v) > kBlowUp)
      fail(ErrorCode::BlowUp, "Lorenz integration left the |v| <= 1e6 envelope");
  }
}

Trajectory record_lorenz(LorenzState s, std::size_t length, const LorenzParams& p) {
  require(length >= 2, ErrorCode::InvalidArgument, "trajectory length must be >= 2");
  Trajectory out{Matrix(length, 3), p.dt, System::Lorenz};
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t c = 0; c < 3; ++c) out.values(t, c) = s[c];
    s = lorenz_rk4_step(s, p);
    check_finite_bounded(s);
  }
  return out;
}

LorenzState settle(LorenzState s, const LorenzParams& p) {
  require(p.dt > 0.0 && p.dt <= 0.02, ErrorCode::InvalidArgument, "Lorenz dt must be in (0, 0.02]");
  for (std::size_t i = 0; i < p.transient; ++i) {
    s = lorenz_rk4_step(s, p);
    check_finite_bounded(s);
  }
  return s;
}

LorenzState random_start(Rng& rng) {
  return {1.0 + rng.normal(), 1.0 + rng.normal(), 1.0 + rng.normal()};
}

}  // namespace

const char* to_string(System system) {
  switch (system) {
    case System::Waveform: return "waveform";
    case System::Oscillator: return "oscillator";
    case System::Lorenz: return "lorenz";
  }
  return "unknown";
}

OscillatorParams sample_oscillator(Rng& rng, OscillatorTrack track) {
  OscillatorParams p;
  p.amplitude = rng.uniform(0.5, 2.0);
  switch (track) {
    case OscillatorTrack::Full:
      p.gamma = rng.uniform(0.2, 2.0);
      p.omega = rng.uniform(2.0, 20.0);
      break;
    case OscillatorTrack::WalkA:
      p.gamma = rng.uniform(0.2, 0.8);
      p.omega = rng.uniform(2.0, 8.0);
      break;
    case OscillatorTrack::WalkB:
      p.gamma = rng.uniform(1.0, 2.0);
      p.omega = rng.uniform(10.0, 20.0);
      break;
  }
  p.phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return p;
}

Trajectory gen_oscillator(const OscillatorParams& p, std::size_t length, double span) {
  require(length >= 2, ErrorCode::InvalidArgument, "trajectory length must be >= 2");
  Trajectory out{Matrix(length, 1), span / static_cast<double>(length), System::Oscillator};
  for (std::size_t i = 0; i < length; ++i) {
    const double t = time_at(i, length, span);
    out.values(i, 0) = p.amplitude * std::exp(-p.gamma * t) * std::cos(p.omega * t + p.phi);
  }
  return out;
}

LorenzState lorenz_rk4_step(const LorenzState& s, const LorenzParams& p) {
  auto f = [&](const LorenzState& v) -> LorenzState {
    return {p.sigma * (v[1] - v[0]), v[0] * (p.rho - v[2]) - v[1], v[0] * v[1] - p.beta * v[2]};
  };
  auto add = [](const LorenzState& a, const LorenzState& b, double h) -> LorenzState {
    return {a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2]};
  };
  const double h = p.dt;
  const auto k1 = f(s);
  const auto k2 = f(add(s, k1, h / 2));
  const auto k3 = f(add(s, k2, h / 2));
  const auto k4 = f(add(s, k3, h));
  LorenzState out;
  for (int i = 0; i < 3; ++i) out[i] = s[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}

Trajectory integrate_lorenz(LorenzState start, std::size_t length, const LorenzParams& p) {
  return record_lorenz(settle(start, p), length, p);
}

Trajectory gen_lorenz(const SeedSpec& seed, std::size_t length, const LorenzParams& p) {
  Rng rng(seed);
  return integrate_lorenz(random_start(rng), length, p);
}

std::pair<Trajectory, Trajectory> lorenz_twins(const SeedSpec& seed, std::size_t length,
                                               double offset, const LorenzParams& p) {
  Rng rng(seed);
  const LorenzState a = settle(random_start(rng), p);
  LorenzState dir{rng.normal(), rng.normal(), rng.normal()};
  const double norm = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
  LorenzState b = a;
  for (int i = 0; i < 3; ++i) b[i] += offset * dir[i] / norm;
  return {record_lorenz(a, length, p), record_lorenz(b, length, p)};
}

Trajectory waveform(std::span<const WaveComponent> components, std::size_t length, double span) {
  require(length >= 2, ErrorCode::InvalidArgument, "trajectory length must be >= 2");
  Trajectory out{Matrix(length, 1), span / static_cast<double>(length), System::Waveform};
  for (std::size_t i = 0; i < length; ++i) {
    const double t = time_at(i, length, span);
    double v = 0.0;
    for (const auto& c : components) v += c.amplitude * std::cos(c.omega * t + c.phi);
    out.values(i, 0) = v;
  }
  return out;
}

Trajectory gen_waveform(const SeedSpec& seed, std::size_t n_components, std::size_t length,
                        double span) {
  require(n_components >= 1, ErrorCode::InvalidArgument, "waveform needs at least one component");
  Rng rng(seed);
  std::vector<WaveComponent> comps(n_components);
  for (auto& c : comps) {
    c.amplitude = rng.uniform(0.5, 2.0);
    c.omega = rng.uniform(2.0, 20.0);
    c.phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  return waveform(comps, length, span);
}

GlobalRange fit_global_range(std::span<const Trajectory> dataset) {
  require(!dataset.empty(), ErrorCode::InvalidArgument, "global range needs a nonempty dataset");
  const std::size_t m = dataset.front().channels();
  GlobalRange r{std::vector<double>(m, INFINITY), std::vector<double>(m, -INFINITY)};
  for (const auto& traj : dataset) {
    require(traj.channels() == m, ErrorCode::DimensionMismatch,
            "trajectories disagree on channel count");
    for (std::size_t t = 0; t < traj.length(); ++t) {
      for (std::size_t c = 0; c < m; ++c) {
        r.min[c] = std::min(r.min[c], traj.values(t, c));
        r.max[c] = std::max(r.max[c], traj.values(t, c));
      }
    }
  }
  for (std::size_t c = 0; c < m; ++c) {
    if (!(r.max[c] > r.min[c]))
      fail(ErrorCode::DegenerateRange, "channel " + std::to_string(c) + " is constant");
  }
  return r;
}

SymbolSequence discretize(const Trajectory& traj, const GlobalRange& range, std::size_t n_bins) {
  const std::size_t m = traj.channels();
  require(range.min.size() == m && range.max.size() == m, ErrorCode::DimensionMismatch,
          "range channel count differs from trajectory");
  for (std::size_t c = 0; c < m; ++c)
    require(range.max[c] > range.min[c], ErrorCode::DegenerateRange, "range max must exceed min");
  SymbolSequence seq{Alphabet::bins(n_bins), {}};
  seq.symbols.reserve(traj.length() * m);
  const double bins = static_cast<double>(n_bins);
  for (std::size_t t = 0; t < traj.length(); ++t) {
    for (std::size_t c = 0; c < m; ++c) {
      const double u = (traj.values(t, c) - range.min[c]) / (range.max[c] - range.min[c]);
      const double b = std::clamp(std::floor(u * bins), 0.0, bins - 1.0);
      seq.symbols.push_back(static_cast<std::uint16_t>(b));
    }
  }
  return seq;
}

Trajectory undiscretize(const SymbolSequence& seq, const GlobalRange& range, std::size_t n_bins,
                        double dt) {
  const std::size_t m = range.min.size();
  require(m >= 1 && seq.size() % m == 0, ErrorCode::DimensionMismatch,
          "sequence length is not a multiple of the channel count");
  Trajectory out{Matrix(seq.size() / m, m), dt, System::Waveform};
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const std::size_t c = i % m;
    require(seq.symbols[i] < n_bins, ErrorCode::BadSymbol, "bin index out of range");
    const double width = (range.max[c] - range.min[c]) / static_cast<double>(n_bins);
    out.values(i / m, c) = range.min[c] + (seq.symbols[i] + 0.5) * width;
  }
  return out;
}

LleResult estimate_lle(std::span<const std::pair<Trajectory, Trajectory>> pairs,
                       const LleOptions& opt) {
  require(!pairs.empty(), ErrorCode::InvalidArgument, "LLE needs at least one twin pair");
  const std::size_t length = pairs.front().first.length();
  const double dt = pairs.front().first.dt;
  for (const auto& [a, b] : pairs) {
    require(a.length() == length && b.length() == length, ErrorCode::LengthMismatch,
            "twin trajectories differ in length");
    require(a.channels() == b.channels(), ErrorCode::DimensionMismatch,
            "twin trajectories differ in channel count");
    require(a.dt == dt && b.dt == dt, ErrorCode::InvalidArgument, "twin trajectories differ in dt");
  }
  LleResult res;
  res.mean_log_separation.assign(length, 0.0);
  for (const auto& [a, b] : pairs) {
    for (std::size_t t = 0; t < length; ++t) {
      double sq = 0.0;
      for (std::size_t c = 0; c < a.channels(); ++c) {
        const double diff = a.values(t, c) - b.values(t, c);
        sq += diff * diff;
      }
      res.mean_log_separation[t] += std::log(std::max(std::sqrt(sq), opt.floor));
    }
  }
  for (double& v : res.mean_log_separation) v /= static_cast<double>(pairs.size());

  const double cutoff = std::log(opt.saturation);
  std::size_t end = opt.skip;
  while (end < length && res.mean_log_separation[end] < cutoff) ++end;
  res.window = end > opt.skip ? end - opt.skip : 0;
  if (res.window < opt.min_window) {
    fail(ErrorCode::SaturatedTooEarly, "separation saturated after " + std::to_string(res.window) +
                                           " samples (need " + std::to_string(opt.min_window) + ")");
  }
  double st = 0.0, sy = 0.0;
  for (std::size_t t = opt.skip; t < end; ++t) {
    st += static_cast<double>(t) * dt;
    sy += res.mean_log_separation[t];
  }
  const double nw = static_cast<double>(res.window);
  const double tbar = st / nw, ybar = sy / nw;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t t = opt.skip; t < end; ++t) {
    const double x = static_cast<double>(t) * dt - tbar;
    sxy += x * (res.mean_log_separation[t] - ybar);
    sxx += x * x;
  }
  res.lambda = sxy / sxx;
  return res;
}

LleResult estimate_lle(const Trajectory& a, const Trajectory& b, const LleOptions& opt) {
  const std::pair<Trajectory, Trajectory> pair{a, b};
  return estimate_lle(std::span(&pair, 1), opt);
}

ButterflyResult butterfly_test(const Trajectory& traj, const ButterflyOptions& opt) {
  ButterflyResult r;
  if (traj.channels() != 3 || traj.length() < 2) return r;
  const Matrix& v = traj.values;
  r.min_z = INFINITY;
  r.max_z = -INFINITY;
  std::size_t left = 0;
  for (std::size_t t = 0; t < traj.length(); ++t) {
    r.max_abs_x = std::max(r.max_abs_x, std::abs(v(t, 0)));
    r.max_abs_y = std::max(r.max_abs_y, std::abs(v(t, 1)));
    r.min_z = std::min(r.min_z, v(t, 2));
    r.max_z = std::max(r.max_z, v(t, 2));
    left += v(t, 0) < 0.0;
  }
  r.left_fraction = static_cast<double>(left) / static_cast<double>(traj.length());
  r.bounds_ok = r.max_abs_x < opt.max_abs_x && r.max_abs_y < opt.max_abs_y &&
                r.min_z > opt.min_z && r.max_z < opt.max_z;

  // Lobe switches: sign changes of x that happen high on the attractor.
  std::vector<std::size_t> crossings;
  for (std::size_t t = 1; t < traj.length(); ++t) {
    const bool flip = (v(t - 1, 0) < 0.0) != (v(t, 0) < 0.0);
    if (flip && 0.5 * (v(t - 1, 2) + v(t, 2)) > opt.z_threshold) crossings.push_back(t);
  }
  r.crossings = crossings.size();
  if (crossings.size() >= 2) {
    r.mean_dwell = static_cast<double>(crossings.back() - crossings.front()) /
                   static_cast<double>(crossings.size() - 1);
  }
  r.lobes_ok = r.crossings >= opt.min_crossings && r.mean_dwell >= opt.min_mean_dwell &&
               r.left_fraction > 0.1 && r.left_fraction < 0.9;
  r.pass = r.lobes_ok && r.bounds_ok;
  return r;
}

}  // namespace geotax::dynamics
