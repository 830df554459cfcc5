#include "geotax/procrustes.hpp"

#include <algorithm>
#include <cmath>

#include "eigen_view.hpp"
#include "geotax/error.hpp"
#include "geotax/parallel.hpp"
#include "geotax/stats.hpp"

namespace geotax::procrustes {

using detail::RowMatrix;
using detail::view;

ProcrustesResult procrustes_align(const Matrix& clean, const Matrix& pert) {
  require(clean.rows() == pert.rows() && clean.cols() == pert.cols(), ErrorCode::ShapeMismatch,
          "Procrustes inputs must share a shape");
  require(clean.rows() >= 2, ErrorCode::TooFewSamples, "Procrustes needs at least two rows");
  const double n = static_cast<double>(clean.rows());

  RowMatrix xc = view(clean);
  RowMatrix xp = view(pert);
  xc.rowwise() -= xc.colwise().mean();
  xp.rowwise() -= xp.colwise().mean();
  const double norm_c = xc.norm();
  const double norm_p = xp.norm();
  require(norm_c > 0.0 && norm_p > 0.0, ErrorCode::DegenerateInput,
          "a centred Procrustes input is all zero");

  ProcrustesResult res;
  res.raw_error = (xc - xp).norm() / std::sqrt(n);
  if (res.raw_error <= 1e-12 * std::max(norm_c, norm_p) / std::sqrt(n)) {
    res.exact_match = true;
    res.rotation = identity(clean.cols());
    return res;
  }

  const Eigen::MatrixXd m = (xp / norm_p).transpose() * (xc / norm_c);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd r = svd.matrixU() * svd.matrixV().transpose();

  const RowMatrix xpr = xp * r;
  res.scale = (xc.cwiseProduct(xpr)).sum() / xpr.squaredNorm();
  res.aligned_error = (xc - res.scale * xpr).norm() / std::sqrt(n);
  res.ratio = res.aligned_error / res.raw_error;
  res.reduction = 1.0 - res.ratio;
  res.rotation = Matrix(clean.cols(), clean.cols());
  view(res.rotation) = r;
  return res;
}

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::BrittleGlass: return "BrittleGlass";
    case Regime::TransitionZone: return "TransitionZone";
    case Regime::UntetheredGel: return "UntetheredGel";
  }
  return "Unknown";
}

RegimeLabel classify_regime(double rho_percent) {
  RegimeLabel out{Regime::TransitionZone, rho_percent};
  if (rho_percent < kBrittleBelowPercent)
    out.label = Regime::BrittleGlass;
  else if (rho_percent > kGelAbovePercent)
    out.label = Regime::UntetheredGel;
  return out;
}

RegimeLabel classify_regime(const ProcrustesResult& result) {
  return classify_regime(100.0 * result.reduction);
}

namespace {

std::vector<double> log_softmax(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  const double lse = mx + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

HeadAgreement frozen_head_agreement(const Matrix& logits_clean, const Matrix& logits_pert) {
  require(logits_clean.rows() == logits_pert.rows() && logits_clean.cols() == logits_pert.cols(),
          ErrorCode::ShapeMismatch, "logit matrices must share a shape");
  require(logits_clean.rows() >= 1 && logits_clean.cols() >= 1, ErrorCode::ShapeMismatch,
          "logit matrices are empty");
  HeadAgreement out;
  std::size_t matches = 0;
  double kl_total = 0.0;
  for (std::size_t t = 0; t < logits_clean.rows(); ++t) {
    const auto a = logits_clean.row(t);
    const auto b = logits_pert.row(t);
    matches += argmax(a) == argmax(b);
    const auto la = log_softmax(a);
    const auto lb = log_softmax(b);
    double kl = 0.0;
    for (std::size_t v = 0; v < la.size(); ++v) kl += std::exp(la[v]) * (la[v] - lb[v]);
    kl_total += std::max(kl, 0.0);
  }
  const double rows = static_cast<double>(logits_clean.rows());
  out.agreement = static_cast<double>(matches) / rows;
  out.mean_kl = kl_total / rows;
  return out;
}

double LogisticModel::decision(std::span<const double> x) const {
  double z = intercept;
  for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * x[j];
  return z;
}

double LogisticModel::probability(std::span<const double> x) const {
  return 1.0 / (1.0 + std::exp(-decision(x)));
}

std::uint32_t LogisticModel::predict(std::span<const double> x) const {
  return decision(x) > 0.0 ? 1u : 0u;
}

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double logistic_objective(const RowMatrix& xa, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                          double C) {
  const Eigen::VectorXd z = xa * beta;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) loss += softplus(z[i]) - y[i] * z[i];
  const auto d = beta.size() - 1;
  return C * loss + 0.5 * beta.head(d).squaredNorm();
}

}  // namespace

LogisticModel fit_logistic(const Matrix& x, std::span<const std::uint32_t> y,
                           const LogisticOptions& opt) {
  require(x.rows() == y.size(), ErrorCode::LengthMismatch, "label count differs from rows");
  require(x.rows() >= 2, ErrorCode::TooFewSamples, "logistic regression needs two rows");
  require(opt.C > 0.0, ErrorCode::InvalidArgument, "C must be positive");
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto d = static_cast<Eigen::Index>(x.cols());
  RowMatrix xa(n, d + 1);
  xa.leftCols(d) = view(x);
  xa.col(d).setOnes();
  Eigen::VectorXd yv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    require(y[i] <= 1, ErrorCode::InvalidArgument, "labels must be 0 or 1");
    yv[i] = y[i];
  }
  Eigen::VectorXd reg = Eigen::VectorXd::Ones(d + 1);
  reg[d] = 0.0;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d + 1);
  double f = logistic_objective(xa, yv, beta, opt.C);
  LogisticModel model;
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    const Eigen::VectorXd z = xa * beta;
    Eigen::VectorXd p(n), s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = 1.0 / (1.0 + std::exp(-z[i]));
      s[i] = p[i] * (1.0 - p[i]);
    }
    const Eigen::VectorXd g = opt.C * xa.transpose() * (p - yv) + reg.cwiseProduct(beta);
    model.iterations = it;
    if (g.norm() < opt.tol) {
      model.converged = true;
      break;
    }
    Eigen::MatrixXd h = opt.C * xa.transpose() * s.asDiagonal() * xa;
    h.diagonal() += reg;
    // Tiny ridge keeps the intercept row solvable when every p saturates.
    h.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = h.ldlt().solve(g);
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 60; ++k) {
      const Eigen::VectorXd cand = beta - t * step;
      const double fc = logistic_objective(xa, yv, cand, opt.C);
      if (fc <= f - 1e-4 * t * g.dot(step)) {
        beta = cand;
        f = fc;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) {
      model.converged = g.norm() < std::sqrt(opt.tol);
      break;
    }
    model.iterations = it + 1;
  }
  model.weights.assign(beta.data(), beta.data() + d);
  model.intercept = beta[d];
  return model;
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const std::uint32_t> labels,
                                                       std::size_t k, const SeedSpec& seed) {
  require(k >= 2, ErrorCode::InvalidArgument, "need at least two folds");
  std::uint32_t max_label = 0;
  for (auto l : labels) max_label = std::max(max_label, l);
  std::vector<std::vector<std::size_t>> by_class(max_label + 1);
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto members = by_class[c];
    Rng class_rng = rng.split(c);
    class_rng.shuffle(members);
    for (std::size_t pos = 0; pos < members.size(); ++pos) folds[pos % k].push_back(members[pos]);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

void check_binary_labels(std::span<const std::uint32_t> labels, std::size_t folds) {
  std::size_t counts[2] = {0, 0};
  for (auto l : labels) {
    require(l <= 1, ErrorCode::InvalidArgument, "labels must be 0 or 1");
    ++counts[l];
  }
  if (counts[0] < folds || counts[1] < folds) {
    fail(ErrorCode::SingleClass, "each class needs at least " + std::to_string(folds) +
                                     " samples (have " + std::to_string(counts[0]) + " and " +
                                     std::to_string(counts[1]) + ")");
  }
}

CvResult frozen_head_classifier(const Matrix& x, std::span<const std::uint32_t> labels,
                                std::size_t folds, const SeedSpec& seed,
                                const LogisticOptions& opt) {
  require(x.rows() == labels.size(), ErrorCode::LengthMismatch, "label count differs from rows");
  check_binary_labels(labels, folds);
  const auto split = stratified_folds(labels, folds, seed);
  CvResult res;
  res.fold_accuracy.assign(folds, 0.0);
  parallel_for(folds, [&](std::size_t f) {
    std::vector<char> is_test(x.rows(), 0);
    for (auto i : split[f]) is_test[i] = 1;
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < x.rows(); ++i)
      if (!is_test[i]) train.push_back(i);
    std::vector<std::uint32_t> y_train;
    for (auto i : train) y_train.push_back(labels[i]);
    const auto model = fit_logistic(x.select_rows(train), y_train, opt);
    std::size_t correct = 0;
    for (auto i : split[f]) correct += model.predict(x.row(i)) == labels[i];
    res.fold_accuracy[f] = static_cast<double>(correct) / static_cast<double>(split[f].size());
  });
  res.mean = mean(res.fold_accuracy);
  res.std = population_std(res.fold_accuracy);
  return res;
}

}  // namespace geotax::procrustes
