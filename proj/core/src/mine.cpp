#include "geotax/mine.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "geotax/error.hpp"
#include "geotax/parallel.hpp"
#include "geotax/pca.hpp"
#include "geotax/stats.hpp"

namespace geotax::mine {

namespace {

double log_mean_exp(std::span<const double> v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double t : v) s += std::exp(t - mx);
  return mx + std::log(s / static_cast<double>(v.size()));
}

// Rows [x_i, z_{zrow[i]}] for i in xrows.
void fill_pairs(Matrix& out, std::size_t offset, const Matrix& x, const Matrix& z,
                std::span<const std::size_t> xrows, std::span<const std::size_t> zrows) {
  const std::size_t dx = x.cols();
  for (std::size_t i = 0; i < xrows.size(); ++i) {
    auto dst = out.row(offset + i);
    const auto xr = x.row(xrows[i]);
    const auto zr = z.row(zrows[i]);
    std::copy(xr.begin(), xr.end(), dst.begin());
    std::copy(zr.begin(), zr.end(), dst.begin() + static_cast<std::ptrdiff_t>(dx));
  }
}

MIEstimate aggregate(std::vector<double> per_seed) {
  MIEstimate est;
  est.mean = mean(per_seed);
  est.std = population_std(per_seed);
  est.excess = est.mean;
  est.per_seed = std::move(per_seed);
  return est;
}

std::vector<double> run_seeds(const Matrix& x, const Matrix& z, const MineConfig& cfg,
                              std::span<const std::uint64_t> seeds,
                              std::vector<MineRun>* runs = nullptr) {
  std::vector<MineRun> out(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) { out[i] = mine_run(x, z, cfg, seeds[i]); });
  std::vector<double> values;
  for (const auto& r : out) values.push_back(r.estimate);
  if (runs) *runs = std::move(out);
  return values;
}

}  // namespace

MineConfig default_mine() { return {statistics_network(0), 0.10, 50}; }

MineConfig sanity_mine() { return {sanity_network(0), 0.10, 50}; }

double dv_bound(const Mlp& net, const Matrix& x, const Matrix& z,
                std::span<const std::size_t> perm) {
  const std::size_t n = x.rows();
  require(z.rows() == n && perm.size() == n, ErrorCode::LengthMismatch,
          "DV bound inputs differ in length");
  std::vector<std::size_t> ident(n);
  for (std::size_t i = 0; i < n; ++i) ident[i] = i;
  Matrix pairs(2 * n, x.cols() + z.cols());
  fill_pairs(pairs, 0, x, z, ident, ident);
  fill_pairs(pairs, n, x, z, ident, perm);
  const Matrix t = net.predict(pairs);
  const std::span<const double> all(t.data());
  return mean(all.subspan(0, n)) - log_mean_exp(all.subspan(n, n));
}

MineRun mine_run(const Matrix& x, const Matrix& z, const MineConfig& cfg, std::uint64_t seed) {
  const std::size_t n = x.rows();
  require(z.rows() == n, ErrorCode::LengthMismatch, "X and Z differ in sample count");
  require(n >= 4, ErrorCode::TooFewSamples, "MINE needs at least 4 samples");
  MlpConfig net_cfg = cfg.net;
  net_cfg.widths.front() = x.cols() + z.cols();
  const Rng root(seed, "mine");
  Mlp net(net_cfg.widths, {seed, "mine/init"});
  Adam adam(net.parameter_count(), net_cfg.lr);
  Rng order = root.split("batches");
  Rng drop = root.split("dropout");
  Rng marginal = root.split("marginal");
  Rng eval = root.split("eval");

  MineRun run;
  run.initial_bound = dv_bound(net, x, z, eval.permutation(n));
  const std::size_t tail = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(net_cfg.epochs * cfg.tail_fraction)));

  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::vector<double> grad;
  Mlp::Tape tape;
  for (std::size_t epoch = 0; epoch < net_cfg.epochs; ++epoch) {
    order.shuffle(idx);
    double bound_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += net_cfg.batch) {
      const std::size_t b = std::min(n, start + net_cfg.batch) - start;
      if (b < 2) continue;
      const std::span<const std::size_t> rows(idx.data() + start, b);
      std::vector<std::size_t> shuffled(rows.begin(), rows.end());
      marginal.shuffle(shuffled);
      Matrix pairs(2 * b, x.cols() + z.cols());
      fill_pairs(pairs, 0, x, z, rows, rows);
      fill_pairs(pairs, b, x, z, rows, shuffled);
      const Matrix t = net.forward(pairs, net_cfg.dropout, &drop, tape);
      const std::span<const double> tv(t.data());
      const auto tj = tv.subspan(0, b);
      const auto tm = tv.subspan(b, b);
      const double lme = log_mean_exp(tm);
      const double bound = mean(tj) - lme;
      if (!std::isfinite(bound))
        fail(ErrorCode::NonFiniteLoss, "DV bound became non-finite at epoch " + std::to_string(epoch));
      // Loss is the negated bound.
      Matrix g(2 * b, 1);
      const double inv_b = 1.0 / static_cast<double>(b);
      for (std::size_t i = 0; i < b; ++i) {
        g.data()[i] = -inv_b;
        g.data()[b + i] = std::exp(tm[i] - lme) * inv_b;
      }
      net.backward(tape, g, grad);
      clip_elementwise(grad, net_cfg.clip);
      adam.step(net.parameters(), grad);
      bound_sum += bound;
      ++batches;
    }
    run.train_bound.push_back(batches ? bound_sum / static_cast<double>(batches) : 0.0);
    if (epoch + tail >= net_cfg.epochs) run.epoch_bound.push_back(dv_bound(net, x, z, eval.permutation(n)));
  }
  run.estimate = mean(run.epoch_bound);
  return run;
}

Matrix zscore(const Matrix& x) {
  Matrix out = x;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    const auto col = x.col(c);
    const double mu = mean(col);
    const double sd = population_std(col);
    for (std::size_t r = 0; r < x.rows(); ++r) out(r, c) = sd > 0.0 ? (x(r, c) - mu) / sd : 0.0;
  }
  return out;
}

MIEstimate mine_estimate(const Matrix& x, const Matrix& z, const MineConfig& cfg,
                         std::span<const std::uint64_t> seeds) {
  require(x.rows() == z.rows(), ErrorCode::LengthMismatch, "X and Z differ in sample count");
  require(!seeds.empty(), ErrorCode::InvalidArgument, "need at least one seed");
  const std::size_t k = std::min({cfg.pca_dim, z.rows(), z.cols()});
  const Matrix zr = zscore(pca_project(z, k).scores);
  return aggregate(run_seeds(zscore(x), zr, cfg, seeds));
}

MIEstimate random_baseline(const Matrix& x, std::size_t dim, const MineConfig& cfg,
                           std::span<const std::uint64_t> seeds, std::uint64_t data_seed) {
  Rng rng(data_seed, "mine/random-baseline");
  Matrix z(x.rows(), dim);
  for (double& v : z.data()) v = rng.normal();
  return aggregate(run_seeds(zscore(x), zscore(z), cfg, seeds));
}

MIEstimate ceiling_calibration(const Matrix& x, double sigma, const MineConfig& cfg,
                               std::span<const std::uint64_t> seeds, std::uint64_t data_seed) {
  require(sigma > 0.0, ErrorCode::InvalidArgument, "ceiling noise must be positive");
  const Matrix xs = zscore(x);
  Rng rng(data_seed, "mine/ceiling");
  Matrix z = xs;
  for (double& v : z.data()) v += sigma * rng.normal();
  return aggregate(run_seeds(xs, z, cfg, seeds));
}

void apply_calibration(MIEstimate& est, double baseline, double ceiling) {
  est.baseline = baseline;
  est.excess = est.mean - baseline;
  est.ceiling = ceiling;
  est.normalized = ceiling != 0.0 ? est.excess / ceiling : 0.0;
}

double gaussian_mi(double rho) {
  require(std::abs(rho) < 1.0, ErrorCode::InvalidArgument, "|rho| must be < 1");
  return -0.5 * std::log(1.0 - rho * rho);
}

double sanity_tolerance(double truth) { return std::max(0.15, 0.3 * truth); }

std::vector<SanityCase> sanity_suite(std::span<const double> rhos, std::size_t n,
                                     const MineConfig& cfg, std::span<const std::uint64_t> seeds,
                                     std::uint64_t data_seed) {
  std::vector<SanityCase> out;
  const Rng root(data_seed, "mine/sanity");
  for (std::size_t k = 0; k < rhos.size(); ++k) {
    const double rho = rhos[k];
    Rng rng = root.split(static_cast<std::uint64_t>(k));
    Matrix x(n, 1), y(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      x(i, 0) = rng.normal();
      y(i, 0) = rho * x(i, 0) + std::sqrt(1.0 - rho * rho) * rng.normal();
    }
    SanityCase c;
    c.rho = rho;
    c.truth = gaussian_mi(rho);
    c.tolerance = sanity_tolerance(c.truth);
    std::vector<MineRun> runs;
    c.estimate = aggregate(run_seeds(zscore(x), zscore(y), cfg, seeds, &runs));
    c.pass = true;
    c.improved = true;
    for (const auto& r : runs) {
      c.pass = c.pass && std::abs(r.estimate - c.truth) < c.tolerance;
      c.improved = c.improved && r.estimate >= r.initial_bound;
    }
    out.push_back(std::move(c));
  }
  return out;
}

double kyte_doolittle(char residue) {
  switch (residue) {
    case 'A': return 1.8;
    case 'R': return -4.5;
    case 'N': return -3.5;
    case 'D': return -3.5;
    case 'C': return 2.5;
    case 'Q': return -3.5;
    case 'E': return -3.5;
    case 'G': return -0.4;
    case 'H': return -3.2;
    case 'I': return 4.5;
    case 'L': return 3.8;
    case 'K': return -3.9;
    case 'M': return 1.9;
    case 'F': return 2.8;
    case 'P': return -1.6;
    case 'S': return -0.8;
    case 'T': return -0.7;
    case 'W': return -0.9;
    case 'Y': return -1.3;
    case 'V': return 4.2;
    default: fail(ErrorCode::BadResidue, std::string("no hydropathy value for '") + residue + "'");
  }
}

std::vector<double> dna_features(const SymbolSequence& seq) {
  require(seq.alphabet.kind() == AlphabetKind::Dna, ErrorCode::BadBase, "DNA features need DNA");
  require(seq.size() >= 2, ErrorCode::TooShort, "DNA features need at least 2 bases");
  std::vector<double> f(kDnaFeatureCount, 0.0);
  std::size_t gc = 0;
  for (auto b : seq.symbols) {
    require(b < 4, ErrorCode::BadBase, "base code out of range");
    gc += b == 1 || b == 2;
  }
  f[0] = static_cast<double>(gc) / static_cast<double>(seq.size());
  const double pairs = static_cast<double>(seq.size() - 1);
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) f[1 + 4 * seq.symbols[i] + seq.symbols[i + 1]] += 1.0;
  for (std::size_t k = 1; k < f.size(); ++k) f[k] /= pairs;
  return f;
}

std::vector<double> protein_features(const SymbolSequence& seq, std::size_t species) {
  require(seq.alphabet.kind() == AlphabetKind::Protein, ErrorCode::BadResidue,
          "protein features need a protein sequence");
  require(seq.size() >= 1, ErrorCode::TooShort, "empty protein sequence");
  require(species < 2, ErrorCode::InvalidArgument, "species index must be 0 or 1");
  std::vector<double> f(kProteinFeatureCount, 0.0);
  const double len = static_cast<double>(seq.size());
  double kd = 0.0;
  std::array<std::size_t, 20> counts{};
  for (auto s : seq.symbols) {
    require(s < 20, ErrorCode::BadResidue, "residue code out of range");
    ++counts[s];
    kd += kyte_doolittle(kProteinLetters[s]);
  }
  for (std::size_t i = 0; i < 20; ++i) f[i] = static_cast<double>(counts[i]) / len;
  auto count_of = [&](char r) { return static_cast<double>(counts[kProteinLetters.find(r)]); };
  f[20] = len / 1000.0;
  f[21] = (count_of('K') + count_of('R') - count_of('D') - count_of('E')) / len;
  f[22] = kd / len;
  f[23 + species] = 1.0;
  return f;
}

const char* to_string(ProbeArch arch) {
  switch (arch) {
    case ProbeArch::Linear: return "linear";
    case ProbeArch::TwoLayer: return "mlp";
    case ProbeArch::ThreeLayer: return "mlp_wide";
  }
  return "unknown";
}

namespace {

double accuracy(const Mlp& net, const Matrix& x, std::span<const std::uint32_t> y) {
  const Matrix logits = net.predict(x);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y.size(); ++i) correct += (logits.data()[i] > 0.0 ? 1u : 0u) == y[i];
  return static_cast<double>(correct) / static_cast<double>(y.size());
}

}  // namespace

ProbeModel train_probe(const Matrix& x, std::span<const std::uint32_t> labels, ProbeArch arch,
                       const SeedSpec& seed, const ProbeOptions& opt) {
  require(arch != ProbeArch::Linear, ErrorCode::InvalidArgument, "linear probes use fit_logistic");
  require(x.rows() == labels.size(), ErrorCode::LengthMismatch, "label count differs from rows");
  const MlpConfig cfg =
      arch == ProbeArch::TwoLayer ? probe_two_layer(x.cols()) : probe_three_layer(x.cols());
  const Rng root(seed);

  // Stratified validation split.
  std::vector<std::size_t> train, val;
  for (std::uint32_t cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) members.push_back(i);
    Rng r = root.split("validation").split(static_cast<std::uint64_t>(cls));
    r.shuffle(members);
    const auto n_val = std::min<std::size_t>(
        members.size() > 1 ? members.size() - 1 : 0,
        std::max<std::size_t>(1, static_cast<std::size_t>(
                                     std::llround(opt.validation_fraction * members.size()))));
    val.insert(val.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_val));
    train.insert(train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_val), members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
  require(!train.empty() && !val.empty(), ErrorCode::TooFewSamples, "too few samples to probe");
  const Matrix xt = x.select_rows(train);
  const Matrix xv = x.select_rows(val);
  std::vector<std::uint32_t> yt, yv;
  for (auto i : train) yt.push_back(labels[i]);
  for (auto i : val) yv.push_back(labels[i]);

  ProbeModel model{Mlp(cfg.widths, {seed.seed, seed.stream + "/probe-init"}), 0, -1.0};
  Mlp best = model.net;
  Adam adam(model.net.parameter_count(), cfg.lr);
  Rng order = root.split("batches");
  const std::size_t batch = std::min(cfg.batch, xt.rows());
  std::vector<std::size_t> idx(xt.rows());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<double> grad;
  Mlp::Tape tape;
  std::size_t stale = 0;
  for (std::size_t epoch = 0; epoch < opt.max_epochs; ++epoch) {
    order.shuffle(idx);
    for (std::size_t start = 0; start < idx.size(); start += batch) {
      const std::size_t end = std::min(idx.size(), start + batch);
      const std::span<const std::size_t> rows(idx.data() + start, end - start);
      const Matrix xb = xt.select_rows(rows);
      const Matrix z = model.net.forward(xb, 0.0, nullptr, tape);
      Matrix g(z.rows(), 1);
      const double inv = 1.0 / static_cast<double>(z.rows());
      for (std::size_t i = 0; i < z.rows(); ++i) {
        const double p = 1.0 / (1.0 + std::exp(-z.data()[i]));
        g.data()[i] = (p - static_cast<double>(yt[rows[i]])) * inv;
      }
      model.net.backward(tape, g, grad);
      add_weight_decay(model.net, cfg.l2 * inv, grad);
      adam.step(model.net.parameters(), grad);
    }
    model.epochs_run = epoch + 1;
    const double score = accuracy(model.net, xv, yv);
    if (score > model.best_validation + opt.tol) {
      model.best_validation = score;
      best = model.net;
      stale = 0;
    } else if (++stale > opt.patience) {
      break;
    }
  }
  model.net = std::move(best);
  return model;
}

procrustes::CvResult mlp_probe_cv(const Matrix& x, std::span<const std::uint32_t> labels,
                                  ProbeArch arch, std::size_t folds, const SeedSpec& seed,
                                  const ProbeOptions& opt) {
  if (arch == ProbeArch::Linear) return procrustes::frozen_head_classifier(x, labels, folds, seed);
  require(x.rows() == labels.size(), ErrorCode::LengthMismatch, "label count differs from rows");
  procrustes::check_binary_labels(labels, folds);
  const auto split = procrustes::stratified_folds(labels, folds, seed);
  procrustes::CvResult res;
  res.fold_accuracy.assign(folds, 0.0);
  parallel_for(folds, [&](std::size_t f) {
    std::vector<char> is_test(x.rows(), 0);
    for (auto i : split[f]) is_test[i] = 1;
    std::vector<std::size_t> train;
    std::vector<std::uint32_t> y_train, y_test;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (!is_test[i]) {
        train.push_back(i);
        y_train.push_back(labels[i]);
      }
    }
    for (auto i : split[f]) y_test.push_back(labels[i]);
    const auto model = train_probe(x.select_rows(train), y_train, arch,
                                   {seed.seed, seed.stream + "/fold" + std::to_string(f)}, opt);
    res.fold_accuracy[f] = accuracy(model.net, x.select_rows(split[f]), y_test);
  });
  res.mean = mean(res.fold_accuracy);
  res.std = population_std(res.fold_accuracy);
  return res;
}

}  // namespace geotax::mine
