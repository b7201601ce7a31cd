#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace torqueid::nn {

inline constexpr double kDefaultLeakySlope = 0.01;

/// Layer sizes input, hidden..., output. Hidden layers use Leaky ReLU, the
/// output layer is affine.
struct MlpConfig {
  std::vector<int> layer_sizes;
  double leaky_slope = kDefaultLeakySlope;
  std::uint64_t seed = 0;

  void validate() const;
};

struct DenseLayer {
  Eigen::MatrixXd weights;  ///< out x in
  Eigen::VectorXd bias;     ///< out
};

struct MlpParams {
  std::vector<DenseLayer> layers;
  double leaky_slope = kDefaultLeakySlope;

  int input_size() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weights.cols()); }
  int output_size() const { return layers.empty() ? 0 : static_cast<int>(layers.back().weights.rows()); }
  std::vector<int> layer_sizes() const;
  std::size_t parameter_count() const;
  bool all_finite() const;
};

/// Gradients share the parameter layout.
using Gradients = std::vector<DenseLayer>;

/// He-normal weights (variance 2/fan_in) for hidden layers, variance
/// 1/fan_in for the linear output layer, zero biases. Depends only on
/// the config.
MlpParams initialize(const MlpConfig& config);

Eigen::VectorXd forward(const MlpParams& params, const Eigen::VectorXd& x);

/// Row-wise forward pass: `x` is samples x inputs.
Eigen::MatrixXd forward_batch(const MlpParams& params, const Eigen::MatrixXd& x);

struct LossAndGrad {
  double loss = 0.0;
  Gradients gradients;
};

/// Mean over all n*d output entries of the squared error, and its gradient
/// by reverse-mode accumulation.
LossAndGrad loss_and_grad(const MlpParams& params, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

struct Evaluation {
  double mse = 0.0;
  Eigen::VectorXd per_column;
};

Evaluation evaluate(const MlpParams& params, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// MSE of a prediction matrix against targets, overall and per column.
Evaluation mse(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& target);

}  // namespace torqueid::nn
