#include "geotax/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "eigen_view.hpp"
#include "geotax/error.hpp"

namespace geotax::mine {

using detail::RowMatrix;
using detail::view;

namespace {

using MapW = Eigen::Map<const RowMatrix>;
using MapB = Eigen::Map<const Eigen::RowVectorXd>;

}  // namespace

MlpConfig statistics_network(std::size_t input) {
  return {{input, 256, 128, 1}, 0.10, 1e-4, 500, 5.0, 64, 0.0};
}

MlpConfig sanity_network(std::size_t input) {
  return {{input, 128, 64, 1}, 0.10, 1e-4, 300, 5.0, 64, 0.0};
}

MlpConfig probe_two_layer(std::size_t input) {
  return {{input, 256, 64, 1}, 0.0, 1e-3, 200, 0.0, 200, 1e-4};
}

MlpConfig probe_three_layer(std::size_t input) {
  return {{input, 512, 256, 64, 1}, 0.0, 1e-3, 200, 0.0, 200, 1e-4};
}

Mlp::Mlp(std::vector<std::size_t> widths, const SeedSpec& seed) : widths_(std::move(widths)) {
  require(widths_.size() >= 2, ErrorCode::InvalidArgument, "an MLP needs input and output widths");
  for (auto w : widths_) require(w >= 1, ErrorCode::InvalidArgument, "layer widths must be >= 1");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    offsets_.push_back(total);
    total += widths_[l] * widths_[l + 1] + widths_[l + 1];
  }
  params_.resize(total);
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths_[l]));
    const std::size_t count = widths_[l] * widths_[l + 1] + widths_[l + 1];
    for (std::size_t i = 0; i < count; ++i) params_[offsets_[l] + i] = rng.uniform(-bound, bound);
  }
}

Matrix Mlp::predict(const Matrix& x) const {
  Tape tape;
  return forward(x, 0.0, nullptr, tape);
}

Matrix Mlp::forward(const Matrix& x, double dropout, Rng* rng, Tape& tape) const {
  require(x.cols() == widths_.front(), ErrorCode::DimensionMismatch,
          "input width " + std::to_string(x.cols()) + " differs from network input " +
              std::to_string(widths_.front()));
  require(dropout >= 0.0 && dropout < 1.0, ErrorCode::InvalidArgument, "dropout must be in [0, 1)");
  const std::size_t layers = widths_.size() - 1;
  const bool drop = dropout > 0.0 && rng != nullptr;
  const double keep_scale = 1.0 / (1.0 - dropout);
  tape.inputs.assign(1, x);
  tape.masks.clear();
  for (std::size_t l = 0; l < layers; ++l) {
    const auto in = static_cast<Eigen::Index>(widths_[l]);
    const auto out = static_cast<Eigen::Index>(widths_[l + 1]);
    const MapW w(params_.data() + offsets_[l], in, out);
    const MapB b(params_.data() + offsets_[l] + in * out, out);
    Matrix z(x.rows(), widths_[l + 1]);
    auto zv = view(z);
    zv.noalias() = view(tape.inputs.back()) * w;
    zv.rowwise() += b;
    if (l + 1 == layers) return z;
    Matrix mask(x.rows(), widths_[l + 1]);
    auto& zd = z.data();
    auto& md = mask.data();
    for (std::size_t i = 0; i < zd.size(); ++i) {
      double m = zd[i] > 0.0 ? 1.0 : 0.0;
      if (drop) m *= rng->uniform() < dropout ? 0.0 : keep_scale;
      md[i] = m;
      zd[i] *= m;
    }
    tape.masks.push_back(std::move(mask));
    tape.inputs.push_back(std::move(z));
  }
  return {};
}

void Mlp::backward(const Tape& tape, const Matrix& grad_out, std::vector<double>& grad) const {
  const std::size_t layers = widths_.size() - 1;
  require(tape.inputs.size() == layers, ErrorCode::InvalidArgument, "tape does not match network");
  grad.assign(params_.size(), 0.0);
  RowMatrix g = view(grad_out);
  for (std::size_t l = layers; l-- > 0;) {
    const auto in = static_cast<Eigen::Index>(widths_[l]);
    const auto out = static_cast<Eigen::Index>(widths_[l + 1]);
    Eigen::Map<RowMatrix> dw(grad.data() + offsets_[l], in, out);
    Eigen::Map<Eigen::RowVectorXd> db(grad.data() + offsets_[l] + in * out, out);
    dw.noalias() = view(tape.inputs[l]).transpose() * g;
    db = g.colwise().sum();
    if (l == 0) break;
    const MapW w(params_.data() + offsets_[l], in, out);
    RowMatrix prev = g * w.transpose();
    g = prev.cwiseProduct(view(tape.masks[l - 1]));
  }
}

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::vector<double>& params, const std::vector<double>& grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

void clip_elementwise(std::vector<double>& grad, double bound) {
  if (bound <= 0.0) return;
  for (double& g : grad) g = std::clamp(g, -bound, bound);
}

void add_weight_decay(const Mlp& net, double l2, std::vector<double>& grad) {
  if (l2 == 0.0) return;
  const auto& w = net.widths();
  const auto& p = net.parameters();
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < w.size(); ++l) {
    const std::size_t nw = w[l] * w[l + 1];
    for (std::size_t i = 0; i < nw; ++i) grad[offset + i] += l2 * p[offset + i];
    offset += nw + w[l + 1];
  }
}

TrainedMlp mlp_train_regression(const Matrix& inputs, const Matrix& targets, const MlpConfig& cfg,
                                const SeedSpec& seed) {
  require(inputs.rows() == targets.rows(), ErrorCode::LengthMismatch,
          "inputs and targets differ in row count");
  require(!cfg.widths.empty() && cfg.widths.back() == targets.cols(), ErrorCode::DimensionMismatch,
          "output width differs from target width");
  require(cfg.batch >= 1, ErrorCode::InvalidArgument, "batch size must be positive");
  for (double v : inputs.data())
    require(std::isfinite(v), ErrorCode::NonFiniteLoss, "non-finite training input");
  const Rng root(seed);
  TrainedMlp out{Mlp(cfg.widths, {seed.seed, seed.stream + "/init"}), {}};
  Adam adam(out.net.parameter_count(), cfg.lr);
  Rng order = root.split("batches");
  Rng dropout = root.split("dropout");
  std::vector<std::size_t> idx(inputs.rows());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<double> grad;
  Mlp::Tape tape;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    order.shuffle(idx);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < idx.size(); start += cfg.batch) {
      const std::size_t end = std::min(idx.size(), start + cfg.batch);
      const std::span<const std::size_t> rows(idx.data() + start, end - start);
      const Matrix xb = inputs.select_rows(rows);
      const Matrix yb = targets.select_rows(rows);
      const Matrix pred = out.net.forward(xb, cfg.dropout, &dropout, tape);
      Matrix g(pred.rows(), pred.cols());
      const double scale = 1.0 / static_cast<double>(pred.data().size());
      double loss = 0.0;
      for (std::size_t i = 0; i < g.data().size(); ++i) {
        const double r = pred.data()[i] - yb.data()[i];
        loss += r * r * scale;
        g.data()[i] = 2.0 * r * scale;
      }
      if (!std::isfinite(loss))
        fail(ErrorCode::NonFiniteLoss, "loss became non-finite at epoch " + std::to_string(epoch));
      out.net.backward(tape, g, grad);
      add_weight_decay(out.net, cfg.l2, grad);
      clip_elementwise(grad, cfg.clip);
      adam.step(out.net.parameters(), grad);
      loss_sum += loss;
      ++batches;
    }
    out.loss_trace.push_back(loss_sum / static_cast<double>(batches));
  }
  return out;
}

}  // namespace geotax::mine
