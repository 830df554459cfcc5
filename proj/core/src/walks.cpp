#include "geotax/walks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "geotax/error.hpp"
#include "geotax/rdm.hpp"
#include "geotax/stats.hpp"

namespace geotax::walks {

Walk build_interpolation_walk(const dynamics::Trajectory& a, const dynamics::Trajectory& b,
                              const dynamics::GlobalRange& range, std::size_t n_steps,
                              std::size_t n_bins) {
  require(a.length() == b.length() && a.channels() == b.channels(), ErrorCode::LengthMismatch,
          "interpolation endpoints differ in shape");
  require(n_steps >= 2, ErrorCode::InvalidArgument, "interpolation needs at least 2 steps");
  Walk w;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double alpha = static_cast<double>(i) / static_cast<double>(n_steps - 1);
    dynamics::Trajectory mix = a;
    if (i == n_steps - 1) {
      mix = b;
    } else if (i > 0) {
      for (std::size_t k = 0; k < mix.values.data().size(); ++k)
        mix.values.data()[k] = (1.0 - alpha) * a.values.data()[k] + alpha * b.values.data()[k];
    }
    w.steps.push_back(dynamics::discretize(mix, range, n_bins));
    w.alpha.push_back(alpha);
    w.changed_position.push_back(std::nullopt);
  }
  return w;
}

Walk build_mutation_walk(const SymbolSequence& wildtype, std::size_t n_mutations, CoreRegion core,
                         const SeedSpec& seed, std::optional<Landmark> landmark) {
  require(wildtype.alphabet.kind() == AlphabetKind::Dna, ErrorCode::BadBase,
          "mutation walks need a DNA sequence");
  require(core.start < core.end && core.end <= wildtype.size(), ErrorCode::RegionTooSmall,
          "core region must lie inside the sequence");
  struct Change {
    std::size_t pos;
    std::uint16_t base;
    bool landmark;
  };
  std::vector<Change> changes;
  if (landmark) {
    require(landmark->position < wildtype.size(), ErrorCode::InvalidArgument,
            "landmark position outside the sequence");
    const auto code = Alphabet::dna().code(landmark->base);
    require(code.has_value(), ErrorCode::BadBase, "landmark base must be one of ACGT");
    require(*code != wildtype.symbols[landmark->position], ErrorCode::InvalidArgument,
            "landmark base equals the wildtype base");
    changes.push_back({landmark->position, *code, true});
  }
  std::vector<std::size_t> pool;
  for (std::size_t p = core.start; p < core.end; ++p)
    if (!landmark || p != landmark->position) pool.push_back(p);
  if (pool.size() < n_mutations) {
    fail(ErrorCode::RegionTooSmall, "core region has " + std::to_string(pool.size()) +
                                        " positions, need " + std::to_string(n_mutations));
  }
  Rng rng(seed);
  Rng pick = rng.split("positions");
  for (std::size_t idx : pick.sample_without_replacement(pool.size(), n_mutations)) {
    const std::size_t pos = pool[idx];
    const auto ref = wildtype.symbols[pos];
    const auto alt = static_cast<std::uint16_t>((ref + 1 + pick.below(3)) % 4);
    changes.push_back({pos, alt, false});
  }
  Rng order = rng.split("order");
  order.shuffle(changes);

  Walk w;
  w.steps.push_back(wildtype);
  w.changed_position.push_back(std::nullopt);
  for (const auto& c : changes) {
    SymbolSequence next = w.steps.back();
    next.symbols[c.pos] = c.base;
    w.steps.push_back(std::move(next));
    w.changed_position.push_back(c.pos);
    if (c.landmark) w.landmark_index = w.steps.size() - 1;
  }
  return w;
}

std::vector<ingest::FastaRecord> to_fasta(const Walk& walk) {
  std::vector<ingest::FastaRecord> out;
  for (std::size_t i = 0; i < walk.steps.size(); ++i) {
    std::string header = "step=" + std::to_string(i) + " pos=";
    header += walk.changed_position[i] ? std::to_string(*walk.changed_position[i]) : "-";
    if (walk.landmark_index && *walk.landmark_index == i) header += " landmark";
    out.push_back({header, walk.steps[i].to_string()});
  }
  return out;
}

std::vector<std::size_t> detect_spikes(std::span<const double> values, double* threshold) {
  require(values.size() >= 3, ErrorCode::TooShort, "spike detection needs at least 3 values");
  const double t = mean(values) + 2.0 * population_std(values);
  if (threshold) *threshold = t;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] > t) out.push_back(i);
  return out;
}

namespace {

void summarise(LipschitzProfile& p) {
  p.mean = mean(p.values);
  p.max = *std::max_element(p.values.begin(), p.values.end());
  p.smoothness_ratio = p.max > 0.0 ? p.mean / p.max : 1.0;
  if (p.values.size() >= 3) p.spikes = detect_spikes(p.values, &p.spike_threshold);
}

}  // namespace

LipschitzProfile lipschitz_l2(const Matrix& e) {
  require(e.rows() >= 2, ErrorCode::TooShort, "a Lipschitz profile needs at least 2 steps");
  LipschitzProfile p;
  for (std::size_t i = 0; i + 1 < e.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < e.cols(); ++j) {
      const double d = e(i + 1, j) - e(i, j);
      s += d * d;
    }
    p.values.push_back(std::sqrt(s));
  }
  summarise(p);
  return p;
}

LipschitzProfile lipschitz_cosine(const Matrix& e) {
  require(e.rows() >= 2, ErrorCode::TooShort, "a Lipschitz profile needs at least 2 steps");
  const Matrix u = normalize_rows(e);
  auto cos_dist = [&](std::size_t a, std::size_t b) {
    double dot = 0.0;
    for (std::size_t j = 0; j < u.cols(); ++j) dot += u(a, j) * u(b, j);
    return std::clamp(1.0 - dot, 0.0, 2.0);
  };
  LipschitzProfile p;
  for (std::size_t i = 0; i + 1 < e.rows(); ++i) p.values.push_back(cos_dist(i, i + 1));
  for (std::size_t i = 0; i < e.rows(); ++i) p.distance_from_start.push_back(i ? cos_dist(0, i) : 0.0);
  summarise(p);
  return p;
}

double mean_of_pair_means(std::span<const LipschitzProfile> pairs) {
  require(!pairs.empty(), ErrorCode::InvalidArgument, "no profiles");
  std::vector<double> means;
  for (const auto& p : pairs) means.push_back(p.mean);
  return mean(means);
}

double gap_statistic(std::span<const double> mean_lipschitz) {
  require(mean_lipschitz.size() >= 2, ErrorCode::InvalidArgument, "gap needs at least two models");
  const auto [lo, hi] = std::minmax_element(mean_lipschitz.begin(), mean_lipschitz.end());
  require(*lo > 0.0, ErrorCode::DegenerateInput, "gap needs positive mean Lipschitz values");
  return *hi / *lo;
}

PcaResult pca_trajectory(const Matrix& embeddings, std::size_t k) {
  return pca_project(embeddings, k);
}

std::string svg_polyline(const Matrix& path, int width, int height, const std::string& title) {
  require(path.rows() >= 1 && path.cols() >= 1, ErrorCode::InvalidArgument, "empty path");
  const std::size_t ycol = path.cols() >= 2 ? 1 : 0;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (std::size_t i = 0; i < path.rows(); ++i) {
    xmin = std::min(xmin, path(i, 0));
    xmax = std::max(xmax, path(i, 0));
    ymin = std::min(ymin, path(i, ycol));
    ymax = std::max(ymax, path(i, ycol));
  }
  const double margin = 20.0;
  const double sx = xmax > xmin ? (width - 2 * margin) / (xmax - xmin) : 0.0;
  const double sy = ymax > ymin ? (height - 2 * margin) / (ymax - ymin) : 0.0;
  char buf[128];
  std::string out;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n",
                width, height, width, height);
  out += buf;
  if (!title.empty()) out += "<title>" + title + "</title>\n";
  out += "<polyline fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < path.rows(); ++i) {
    const double x = margin + (path(i, 0) - xmin) * sx;
    const double y = height - margin - (path(i, ycol) - ymin) * sy;
    std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", i ? " " : "", x, y);
    out += buf;
  }
  out += "\"/>\n";
  const double x0 = margin + (path(0, 0) - xmin) * sx;
  const double y0 = height - margin - (path(0, ycol) - ymin) * sy;
  std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"3\" fill=\"#c00000\"/>\n", x0, y0);
  out += buf;
  out += "</svg>\n";
  return out;
}

std::string profile_csv(const LipschitzProfile& profile) {
  std::string out = "step,L\n";
  char buf[64];
  for (std::size_t i = 0; i < profile.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, profile.values[i]);
    out += buf;
  }
  return out;
}

}  // namespace geotax::walks
