#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "geotax/matrix.hpp"
#include "geotax/rng.hpp"

namespace geotax::mine {

struct MlpConfig {
  std::vector<std::size_t> widths;  // input, hidden..., output
  double dropout = 0.10;            // after each hidden ReLU
  double lr = 1e-4;
  std::size_t epochs = 500;
  double clip = 5.0;                // elementwise bound on the gradient
  std::size_t batch = 64;
  double l2 = 0.0;                  // penalty on weights (not biases)
};

// input -> 256 -> 128 -> 1, 500 epochs.
MlpConfig statistics_network(std::size_t input);
// input -> 128 -> 64 -> 1, 300 epochs.
MlpConfig sanity_network(std::size_t input);
// Probe heads with one logit output: hidden (256, 64) or (512, 256, 64).
MlpConfig probe_two_layer(std::size_t input);
MlpConfig probe_three_layer(std::size_t input);

// Fully connected ReLU network with a linear output layer. Parameters live in
// one flat vector, laid out per layer as W (in x out, row-major) then b.
class Mlp {
 public:
  Mlp() = default;
  // Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  Mlp(std::vector<std::size_t> widths, const SeedSpec& seed);

  const std::vector<std::size_t>& widths() const noexcept { return widths_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }
  std::vector<double>& parameters() noexcept { return params_; }
  const std::vector<double>& parameters() const noexcept { return params_; }

  // Evaluation pass, dropout off.
  Matrix predict(const Matrix& x) const;

  // Activations kept for the backward pass.
  struct Tape {
    std::vector<Matrix> inputs;  // input to each layer
    std::vector<Matrix> masks;   // d act / d pre-activation per hidden layer
  };

  // Training pass. Inverted dropout with rate p uses `rng`; p = 0 or a null
  // rng disables it.
  Matrix forward(const Matrix& x, double dropout, Rng* rng, Tape& tape) const;

  // Gradient of a loss with dL/d(output) = grad_out, written into grad
  // (resized to parameter_count()).
  void backward(const Tape& tape, const Matrix& grad_out, std::vector<double>& grad) const;

  bool operator==(const Mlp&) const = default;

 private:
  std::vector<std::size_t> widths_;
  std::vector<double> params_;
  std::vector<std::size_t> offsets_;  // start of W for each layer
};

class Adam {
 public:
  explicit Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);
  void step(std::vector<double>& params, const std::vector<double>& grad);
  double lr() const noexcept { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<double> m_, v_;
};

void clip_elementwise(std::vector<double>& grad, double bound);

// Adds l2 * W (biases excluded) to grad.
void add_weight_decay(const Mlp& net, double l2, std::vector<double>& grad);

struct TrainedMlp {
  Mlp net;
  std::vector<double> loss_trace;  // mean minibatch loss per epoch
};

// Mean squared error regression. Batch order and dropout masks come from the
// seed. Throws NonFiniteLoss.
TrainedMlp mlp_train_regression(const Matrix& inputs, const Matrix& targets, const MlpConfig& cfg,
                                const SeedSpec& seed);

}  // namespace geotax::mine
