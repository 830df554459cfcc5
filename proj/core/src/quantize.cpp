#include "geotax/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geotax/error.hpp"
#include "geotax/parallel.hpp"
#include "geotax/procrustes.hpp"

namespace geotax::quantize {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

struct Assignment {
  std::vector<std::size_t> label;
  std::vector<double> dist;  // squared distance to the assigned centroid
  double inertia = 0.0;
};

std::pair<std::size_t, double> nearest_with_distance(const Matrix& centroids,
                                                     std::span<const double> p) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const double d = sq_dist(p, centroids.row(c));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return {best, best_d};
}

Assignment assign(const Matrix& data, const Matrix& centroids) {
  Assignment a;
  a.label.resize(data.rows());
  a.dist.resize(data.rows());
  parallel_for(data.rows(), [&](std::size_t i) {
    const auto [c, d] = nearest_with_distance(centroids, data.row(i));
    a.label[i] = c;
    a.dist[i] = d;
  });
  a.inertia = chunked_sum(data.rows(), 256, [&](std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += a.dist[i];
    return s;
  });
  return a;
}

// Adds k-means++ centres to `chosen` until it has k rows.
Matrix plus_plus(const Matrix& data, Matrix chosen, std::size_t k, Rng& rng) {
  const std::size_t n = data.rows(), m = data.cols();
  std::vector<double> rows_data = chosen.data();
  std::size_t have = chosen.rows();
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  auto absorb = [&](std::span<const double> c) {
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(data.row(i), c));
  };
  if (have == 0) {
    const auto first = static_cast<std::size_t>(rng.below(n));
    const auto r = data.row(first);
    rows_data.insert(rows_data.end(), r.begin(), r.end());
    have = 1;
  }
  for (std::size_t c = 0; c < have; ++c)
    absorb(std::span<const double>(rows_data.data() + c * m, m));
  while (have < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(rng.below(n));
    }
    const auto r = data.row(pick);
    rows_data.insert(rows_data.end(), r.begin(), r.end());
    absorb(r);
    ++have;
  }
  return Matrix(k, m, std::move(rows_data));
}

}  // namespace

const char* to_string(Method method) { return method == Method::Uniform ? "uniform" : "kmeans"; }

Codebook kmeans_from(const Matrix& data, Matrix init, const KMeansOptions& opt) {
  const std::size_t k = init.rows(), m = data.cols();
  require(init.cols() == m, ErrorCode::DimensionMismatch, "initial centroids have the wrong width");
  require(data.rows() >= k, ErrorCode::TooFewPoints,
          "k-means needs at least K=" + std::to_string(k) + " points, got " +
              std::to_string(data.rows()));
  Codebook cb{std::move(init), Method::KMeans, 0.0, {}, 0};
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    Assignment a = assign(data, cb.centroids);
    cb.inertia = a.inertia;
    cb.inertia_trace.push_back(a.inertia);
    cb.iterations = it + 1;
    const bool converged =
        std::isfinite(prev) && (prev - a.inertia) <= opt.tol * std::max(prev, 1e-300);
    if (converged || a.inertia == 0.0) break;
    prev = a.inertia;

    Matrix sums(k, m);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
      const auto r = data.row(i);
      for (std::size_t j = 0; j < m; ++j) sums(a.label[i], j) += r[j];
      ++counts[a.label[i]];
    }
    std::vector<char> taken(data.rows(), 0);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        for (std::size_t j = 0; j < m; ++j)
          cb.centroids(c, j) = sums(c, j) / static_cast<double>(counts[c]);
        continue;
      }
      // Empty cluster: move it onto the worst-served point not yet used.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < data.rows(); ++i) {
        if (!taken[i] && a.dist[i] > far_d) {
          far_d = a.dist[i];
          far = i;
        }
      }
      taken[far] = 1;
      a.dist[far] = 0.0;
      for (std::size_t j = 0; j < m; ++j) cb.centroids(c, j) = data(far, j);
    }
  }
  return cb;
}

Codebook kmeans_fit(const Matrix& data, std::size_t k, const SeedSpec& seed,
                    const KMeansOptions& opt) {
  require(k >= 1, ErrorCode::InvalidArgument, "K must be positive");
  require(data.rows() >= k, ErrorCode::TooFewPoints,
          "k-means needs at least K=" + std::to_string(k) + " points, got " +
              std::to_string(data.rows()));
  Rng rng(seed);
  return kmeans_from(data, plus_plus(data, Matrix(0, data.cols()), k, rng), opt);
}

std::vector<Codebook> kmeans_sweep(const Matrix& data, std::span<const std::size_t> ks,
                                   const SeedSpec& seed, bool nested, const KMeansOptions& opt) {
  std::vector<Codebook> out;
  Rng rng(seed);
  for (std::size_t idx = 0; idx < ks.size(); ++idx) {
    require(idx == 0 || ks[idx] > ks[idx - 1], ErrorCode::InvalidArgument,
            "sweep sizes must be strictly increasing");
    require(data.rows() >= ks[idx], ErrorCode::TooFewPoints, "too few points for K");
    Rng step = rng.split(static_cast<std::uint64_t>(ks[idx]));
    Matrix init = nested && !out.empty() ? out.back().centroids : Matrix(0, data.cols());
    out.push_back(kmeans_from(data, plus_plus(data, std::move(init), ks[idx], step), opt));
  }
  return out;
}

Codebook uniform_codebook(double lo, double hi, std::size_t k) {
  require(hi > lo, ErrorCode::DegenerateRange, "uniform codebook needs hi > lo");
  require(k >= 2, ErrorCode::InvalidArgument, "uniform codebook needs K >= 2");
  Codebook cb{Matrix(k, 1), Method::Uniform, 0.0, {}, 0};
  const double w = (hi - lo) / static_cast<double>(k);
  for (std::size_t c = 0; c < k; ++c) cb.centroids(c, 0) = lo + (static_cast<double>(c) + 0.5) * w;
  return cb;
}

std::size_t nearest(const Codebook& cb, std::span<const double> point) {
  require(point.size() == cb.dim(), ErrorCode::DimensionMismatch, "point width differs from codebook");
  return nearest_with_distance(cb.centroids, point).first;
}

SymbolSequence encode(const Codebook& cb, const Matrix& points) {
  require(points.cols() == cb.dim(), ErrorCode::DimensionMismatch,
          "point width differs from codebook");
  SymbolSequence seq{Alphabet::bins(cb.size()), std::vector<std::uint16_t>(points.rows())};
  parallel_for(points.rows(), [&](std::size_t i) {
    seq.symbols[i] = static_cast<std::uint16_t>(nearest_with_distance(cb.centroids, points.row(i)).first);
  });
  return seq;
}

Matrix decode(const Codebook& cb, const SymbolSequence& codes) {
  Matrix out(codes.size(), cb.dim());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const auto c = codes.symbols[i];
    require(c < cb.size(), ErrorCode::BadSymbol,
            "code " + std::to_string(c) + " out of range for K=" + std::to_string(cb.size()));
    for (std::size_t j = 0; j < cb.dim(); ++j) out(i, j) = cb.centroids(c, j);
  }
  return out;
}

double reconstruction_mse(const Codebook& cb, const Matrix& data) {
  require(data.rows() >= 1, ErrorCode::InvalidArgument, "no data");
  const Matrix rec = decode(cb, encode(cb, data));
  const double total = chunked_sum(data.rows(), 256, [&](std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += sq_dist(data.row(i), rec.row(i));
    return s;
  });
  return total / static_cast<double>(data.rows() * data.cols());
}

double boundary_crossing_rate(const Codebook& cb, const Matrix& data, double sigma,
                              const SeedSpec& seed, std::size_t trials) {
  require(sigma > 0.0, ErrorCode::InvalidArgument, "sigma must be positive");
  require(trials >= 1, ErrorCode::InvalidArgument, "trials must be positive");
  const Rng root(seed);
  std::vector<std::size_t> crossed(data.rows(), 0);
  parallel_for(data.rows(), [&](std::size_t i) {
    Rng rng = root.split(static_cast<std::uint64_t>(i));
    const std::size_t base = nearest_with_distance(cb.centroids, data.row(i)).first;
    std::vector<double> p(data.cols());
    for (std::size_t t = 0; t < trials; ++t) {
      for (std::size_t j = 0; j < p.size(); ++j) p[j] = data(i, j) + sigma * rng.normal();
      crossed[i] += nearest_with_distance(cb.centroids, p).first != base;
    }
  });
  std::size_t total = 0;
  for (auto c : crossed) total += c;
  return static_cast<double>(total) / static_cast<double>(data.rows() * trials);
}

InverseLogFit fit_inverse_log(std::span<const double> ks, std::span<const double> d) {
  require(ks.size() == d.size(), ErrorCode::LengthMismatch, "K and D lengths differ");
  std::vector<double> x;
  for (double k : ks) {
    require(k > 1.0, ErrorCode::InvalidArgument, "K must exceed 1");
    x.push_back(1.0 / std::log(k));
  }
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  const auto distinct = std::unique(sorted.begin(), sorted.end()) - sorted.begin();
  if (distinct < 3) fail(ErrorCode::SingularFit, "need at least three distinct K");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += d[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (d[i] - my);
    syy += (d[i] - my) * (d[i] - my);
  }
  InverseLogFit fit;
  fit.b = sxy / sxx;
  fit.a = my - fit.b * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = d[i] - (fit.a + fit.b * x[i]);
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

double rd_bound(double variance, double intrinsic_dim, double rate_bits) {
  require(variance > 0.0 && intrinsic_dim > 0.0 && rate_bits >= 0.0, ErrorCode::InvalidArgument,
          "rd_bound needs variance > 0, d_M > 0, R >= 0");
  return variance * std::exp2(-2.0 * rate_bits / intrinsic_dim);
}

double high_rate_ratio(double k1, double k2, double intrinsic_dim) {
  require(k1 > 0.0 && k2 > 0.0 && intrinsic_dim > 0.0, ErrorCode::InvalidArgument,
          "high_rate_ratio needs positive arguments");
  return std::pow(k2 / k1, -2.0 / intrinsic_dim);
}

RDCurve vq_sweep(const Matrix& data, std::span<const std::size_t> ks, const SeedSpec& seed,
                 const SweepOptions& opt) {
  require(opt.noise_sigma > 0.0, ErrorCode::InvalidArgument, "noise sigma must be positive");
  const Rng root(seed);
  const auto books = kmeans_sweep(data, ks, {seed.seed, seed.stream + "/kmeans"}, opt.nested,
                                  opt.kmeans);
  Matrix noisy = data;
  Rng noise = root.split("noise");
  for (double& v : noisy.data()) v += opt.noise_sigma * noise.normal();

  RDCurve curve;
  std::vector<double> kd, dd;
  for (const auto& cb : books) {
    RDRow row;
    row.k = cb.size();
    row.recon_mse = reconstruction_mse(cb, data);
    const Matrix clean_rec = decode(cb, encode(cb, data));
    const Matrix noisy_rec = decode(cb, encode(cb, noisy));
    const auto pr = procrustes::procrustes_align(clean_rec, noisy_rec);
    row.procrustes_d = pr.exact_match ? 0.0 : pr.aligned_error;
    row.crossing_rate = boundary_crossing_rate(cb, data, opt.noise_sigma,
                                               {seed.seed, seed.stream + "/crossing"}, 1);
    kd.push_back(static_cast<double>(row.k));
    dd.push_back(row.procrustes_d);
    curve.rows.push_back(row);
  }
  if (kd.size() >= 3) curve.fit = fit_inverse_log(kd, dd);
  return curve;
}

}  // namespace geotax::quantize
