#include "geotax/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "geotax/error.hpp"
#include "geotax/parallel.hpp"
#include "geotax/rdm.hpp"

namespace geotax::stability {

namespace {

std::vector<std::size_t> iota_vec(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

// Two disjoint halves of floor(n/2) drawn from `pool`, each sorted ascending.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> random_halves(
    std::span<const std::size_t> pool, Rng& rng) {
  std::vector<std::size_t> order(pool.begin(), pool.end());
  rng.shuffle(order);
  const std::size_t half = order.size() / 2;
  std::vector<std::size_t> a(order.begin(), order.begin() + half);
  std::vector<std::size_t> b(order.begin() + half, order.begin() + 2 * half);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return {std::move(a), std::move(b)};
}

template <class F>
SplitScore run_splits(std::size_t n_splits, const SeedSpec& seed, const char* tag, F&& one) {
  SplitScore out;
  out.per_split.assign(n_splits, 0.0);
  std::vector<char> degenerate(n_splits, 0);
  const Rng root = Rng(seed).split(tag);
  parallel_for(n_splits, [&](std::size_t s) {
    Rng rng = root.split(static_cast<std::uint64_t>(s));
    const Correlation c = one(rng);
    out.per_split[s] = c.value;
    degenerate[s] = c.degenerate;
  });
  out.value = tree_sum(out.per_split) / static_cast<double>(n_splits);
  for (char d : degenerate) out.degenerate_splits += d;
  return out;
}

std::vector<double> row_norms_diff(const Matrix& a, const Matrix& b) {
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double d = a(i, j) - b(i, j);
      s += d * d;
    }
    out[i] = std::sqrt(s);
  }
  return out;
}

void check_same_shape(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::ShapeMismatch,
          "clean and perturbed embeddings differ in shape");
}

}  // namespace

const char* to_string(CompositeVariant v) {
  return v == CompositeVariant::Anchor ? "anchor" : "perturbation";
}

void SplitConfig::validate() const {
  require(n_splits >= 1, ErrorCode::ConfigError, "n_splits must be >= 1");
  require(max_samples >= 10, ErrorCode::ConfigError, "max_samples must be >= 10");
  require(n_bootstrap >= 1, ErrorCode::ConfigError, "n_bootstrap must be >= 1");
}

std::size_t default_anchor_count(std::size_t n) { return std::max<std::size_t>(1, std::min<std::size_t>(50, n / 10)); }

Correlation rdm_similarity(const Matrix& clean, const Matrix& pert) {
  require(clean.rows() == pert.rows(), ErrorCode::ShapeMismatch,
          "RDM similarity needs the same sample count");
  require(clean.rows() >= 3, ErrorCode::TooFewSamples, "RDM similarity needs at least 3 samples");
  const auto a = cosine_rdm(clean);
  const auto b = cosine_rdm(pert);
  return spearman(a.condensed(), b.condensed());
}

Correlation sample_split_halves(const Matrix& x, std::span<const std::size_t> first,
                                std::span<const std::size_t> second) {
  require(first.size() == second.size(), ErrorCode::LengthMismatch, "halves differ in size");
  require(first.size() >= 3, ErrorCode::TooFewSamples, "each half needs at least 3 samples");
  const auto a = cosine_rdm(x.select_rows(first));
  const auto b = cosine_rdm(x.select_rows(second));
  return spearman(a.condensed(), b.condensed());
}

SplitScore sample_split(const Matrix& x, const SplitConfig& cfg, const SeedSpec& seed) {
  if (x.rows() < 6) {
    fail(ErrorCode::TooFewSamples,
         "sample split needs at least 6 samples, got " + std::to_string(x.rows()));
  }
  const auto pool = iota_vec(x.rows());
  return run_splits(cfg.n_splits, seed, "sample_split", [&](Rng& rng) {
    const auto [a, b] = random_halves(pool, rng);
    return sample_split_halves(x, a, b);
  });
}

Correlation feature_split_halves(const Matrix& x, std::span<const std::size_t> first,
                                 std::span<const std::size_t> second) {
  require(!first.empty() && !second.empty(), ErrorCode::TooFewFeatures, "empty feature half");
  require(x.rows() >= 3, ErrorCode::TooFewSamples, "feature split needs at least 3 samples");
  const auto a = cosine_rdm(x.select_cols(first));
  const auto b = cosine_rdm(x.select_cols(second));
  return spearman(a.condensed(), b.condensed());
}

SplitScore feature_split(const Matrix& x, const SplitConfig& cfg, const SeedSpec& seed) {
  if (x.cols() < 4) {
    fail(ErrorCode::TooFewFeatures,
         "feature split needs at least 4 features, got " + std::to_string(x.cols()));
  }
  const auto pool = iota_vec(x.cols());
  return run_splits(cfg.n_splits, seed, "feature_split", [&](Rng& rng) {
    const auto [a, b] = random_halves(pool, rng);
    return feature_split_halves(x, a, b);
  });
}

Correlation anchor_stability_halves(const Matrix& x, std::span<const std::size_t> anchors,
                                    std::span<const std::size_t> first,
                                    std::span<const std::size_t> second, bool rank_normalize) {
  require(!anchors.empty(), ErrorCode::InvalidArgument, "need at least one anchor");
  require(first.size() == second.size(), ErrorCode::LengthMismatch, "halves differ in size");
  const Matrix anchor_rows = x.select_rows(anchors);
  Matrix a = cosine_cross_distances(anchor_rows, x.select_rows(first));
  Matrix b = cosine_cross_distances(anchor_rows, x.select_rows(second));
  require(a.data().size() >= 3, ErrorCode::TooFewSamples, "anchor blocks need at least 3 entries");
  if (rank_normalize) {
    for (Matrix* block : {&a, &b}) {
      for (std::size_t r = 0; r < block->rows(); ++r) {
        auto row = block->row(r);
        const auto ranks = average_ranks(row);
        for (std::size_t j = 0; j < row.size(); ++j)
          row[j] = ranks[j] / static_cast<double>(row.size());
      }
    }
  }
  return spearman(a.data(), b.data());
}

SplitScore anchor_stability(const Matrix& x, const SplitConfig& cfg, const SeedSpec& seed) {
  const std::size_t m = cfg.anchor_count ? cfg.anchor_count : default_anchor_count(x.rows());
  if (x.rows() < m + 4) {
    fail(ErrorCode::TooFewSamples, "anchor stability needs n >= m + 4 (n=" +
                                       std::to_string(x.rows()) + ", m=" + std::to_string(m) + ")");
  }
  Rng anchor_rng = Rng(seed).split("anchors");
  auto anchors = anchor_rng.sample_without_replacement(x.rows(), m);
  std::sort(anchors.begin(), anchors.end());
  std::vector<char> is_anchor(x.rows(), 0);
  for (auto a : anchors) is_anchor[a] = 1;
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < x.rows(); ++i)
    if (!is_anchor[i]) pool.push_back(i);
  return run_splits(cfg.n_splits, seed, "anchor_split", [&](Rng& rng) {
    const auto [a, b] = random_halves(pool, rng);
    return anchor_stability_halves(x, anchors, a, b, cfg.rank_normalize_anchors);
  });
}

Correlation perturbation_stability(std::span<const double> input_deltas, const Matrix& clean,
                                   const Matrix& pert) {
  check_same_shape(clean, pert);
  require(input_deltas.size() == clean.rows(), ErrorCode::LengthMismatch,
          "input delta count differs from sample count");
  const auto disp = row_norms_diff(clean, pert);
  return spearman(input_deltas, disp);
}

double perturbation_magnitude(const Matrix& clean, const Matrix& pert) {
  check_same_shape(clean, pert);
  const auto disp = row_norms_diff(clean, pert);
  return tree_sum(disp) / static_cast<double>(disp.size());
}

std::vector<std::size_t> subsample_indices(std::size_t n, const std::vector<std::uint32_t>* labels,
                                           std::size_t max_samples, const SeedSpec& seed) {
  if (n <= max_samples) return iota_vec(n);
  Rng rng = Rng(seed).split("subsample");
  std::vector<std::size_t> out;
  if (!labels) {
    out = rng.sample_without_replacement(n, max_samples);
  } else {
    std::map<std::uint32_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[(*labels)[i]].push_back(i);
    struct Share {
      std::uint32_t label;
      std::size_t take;
      double remainder;
    };
    std::vector<Share> shares;
    std::size_t allocated = 0;
    for (const auto& [label, members] : groups) {
      const double exact = static_cast<double>(max_samples) * static_cast<double>(members.size()) /
                           static_cast<double>(n);
      const auto take = static_cast<std::size_t>(std::floor(exact));
      shares.push_back({label, take, exact - static_cast<double>(take)});
      allocated += take;
    }
    std::vector<std::size_t> order(shares.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return shares[a].remainder > shares[b].remainder;
    });
    for (std::size_t i = 0; allocated < max_samples; ++i, ++allocated) ++shares[order[i]].take;
    for (const auto& s : shares) {
      const auto& members = groups[s.label];
      Rng class_rng = rng.split(static_cast<std::uint64_t>(s.label));
      for (auto pos : class_rng.sample_without_replacement(members.size(), s.take))
        out.push_back(members[pos]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> bootstrap_indices(std::size_t n, const std::vector<std::uint32_t>* labels,
                                           const SeedSpec& seed) {
  Rng rng = Rng(seed).split("bootstrap");
  std::vector<std::size_t> out;
  out.reserve(n);
  if (!labels) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<std::size_t>(rng.below(n)));
  } else {
    std::map<std::uint32_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[(*labels)[i]].push_back(i);
    for (const auto& [label, members] : groups) {
      Rng class_rng = rng.split(static_cast<std::uint64_t>(label));
      for (std::size_t i = 0; i < members.size(); ++i)
        out.push_back(members[class_rng.below(members.size())]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double composite(const Metrics& m, CompositeVariant variant) {
  const double fourth =
      variant == CompositeVariant::Anchor ? m.anchor_stability : m.perturbation_stability;
  return (m.sample_split + m.feature_split + m.rdm_similarity + fourth) / 4.0;
}

StabilityReport evaluate(const EmbeddingMatrix& clean, const EmbeddingMatrix& pert,
                         std::span<const double> input_deltas, const SplitConfig& cfg,
                         const SeedSpec& seed, const std::string& perturbation) {
  cfg.validate();
  check_same_shape(clean.values(), pert.values());
  require(input_deltas.empty() || input_deltas.size() == clean.n(), ErrorCode::LengthMismatch,
          "input delta count differs from sample count");
  const auto* labels = clean.has_labels() ? &*clean.labels() : nullptr;
  const auto sub = subsample_indices(clean.n(), labels, cfg.max_samples, seed);

  std::vector<std::uint32_t> sub_labels;
  if (labels)
    for (auto i : sub) sub_labels.push_back((*labels)[i]);

  StabilityReport rep;
  rep.perturbation = perturbation;
  rep.provenance = {seed.seed,       seed.stream,   clean.n(),
                    sub.size(),      cfg.n_splits,  cfg.n_bootstrap,
                    cfg.anchor_count ? cfg.anchor_count : default_anchor_count(sub.size()),
                    cfg.rank_normalize_anchors, cfg.variant, 0};

  const Rng root(seed);
  for (std::size_t r = 0; r < cfg.n_bootstrap; ++r) {
    const Rng rep_rng = root.split("replicate").split(static_cast<std::uint64_t>(r));
    const SeedSpec rep_seed{rep_rng.key(), "replicate"};
    const auto draw = bootstrap_indices(sub.size(), labels ? &sub_labels : nullptr, rep_seed);
    std::vector<std::size_t> rows;
    rows.reserve(draw.size());
    for (auto i : draw) rows.push_back(sub[i]);
    const Matrix xc = clean.values().select_rows(rows);
    const Matrix xp = pert.values().select_rows(rows);

    Metrics m;
    const auto rdm = rdm_similarity(xc, xp);
    const auto ss = sample_split(xp, cfg, rep_seed);
    const auto fs = feature_split(xp, cfg, rep_seed);
    const auto as = anchor_stability(xp, cfg, rep_seed);
    m.rdm_similarity = rdm.value;
    m.sample_split = ss.value;
    m.feature_split = fs.value;
    m.anchor_stability = as.value;
    std::size_t degenerate = rdm.degenerate + ss.degenerate_splits + fs.degenerate_splits +
                             as.degenerate_splits;
    if (!input_deltas.empty()) {
      std::vector<double> deltas;
      for (auto i : rows) deltas.push_back(input_deltas[i]);
      const auto ps = perturbation_stability(deltas, xc, xp);
      m.perturbation_stability = ps.value;
      degenerate += ps.degenerate;
    } else {
      ++degenerate;
    }
    m.perturbation_magnitude = perturbation_magnitude(xc, xp);
    m.composite = composite(m, cfg.variant);
    rep.provenance.degenerate_correlations += degenerate;
    rep.replicates.push_back(m);
  }

  auto field = [&](double Metrics::*f) {
    std::vector<double> v;
    for (const auto& m : rep.replicates) v.push_back(m.*f);
    return std::pair{mean(v), population_std(v)};
  };
  for (auto f : {&Metrics::rdm_similarity, &Metrics::sample_split, &Metrics::feature_split,
                 &Metrics::anchor_stability, &Metrics::perturbation_stability,
                 &Metrics::perturbation_magnitude, &Metrics::composite}) {
    const auto [mu, sd] = field(f);
    rep.mean.*f = mu;
    rep.std.*f = sd;
  }
  return rep;
}

namespace {

nlohmann::ordered_json metrics_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["rdm_similarity"] = m.rdm_similarity;
  j["sample_split"] = m.sample_split;
  j["feature_split"] = m.feature_split;
  j["anchor_stability"] = m.anchor_stability;
  j["perturbation_stability"] = m.perturbation_stability;
  j["perturbation_magnitude"] = m.perturbation_magnitude;
  j["composite"] = m.composite;
  return j;
}

}  // namespace

std::string to_ndjson(std::span<const StabilityReport> reports) {
  std::string out;
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["perturbation"] = r.perturbation;
    j["mean"] = metrics_json(r.mean);
    j["std"] = metrics_json(r.std);
    const auto& p = r.provenance;
    j["provenance"] = {{"seed", p.seed},
                       {"stream", p.stream},
                       {"n_input", p.n_input},
                       {"subsample_size", p.subsample_size},
                       {"n_splits", p.n_splits},
                       {"n_bootstrap", p.n_bootstrap},
                       {"anchor_count", p.anchor_count},
                       {"rank_normalize_anchors", p.rank_normalize_anchors},
                       {"composite_variant", to_string(p.variant)},
                       {"degenerate_correlations", p.degenerate_correlations}};
    out += j.dump() + "\n";
  }
  return out;
}

std::string to_csv(std::span<const StabilityReport> reports) {
  std::string out = "Perturbation,RDM Sim.,Pert. Stab.,Pert. Mag.,Composite\n";
  char buf[256];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, ",%.4f,%.4f,%.4f,%.4f\n", r.mean.rdm_similarity,
                  r.mean.perturbation_stability, r.mean.perturbation_magnitude, r.mean.composite);
    out += r.perturbation + buf;
  }
  return out;
}

}  // namespace geotax::stability
