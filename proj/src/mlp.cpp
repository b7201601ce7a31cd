#include "torqueid/mlp.hpp"

#include <cmath>
#include <random>
#include <string>

#include "torqueid/errors.hpp"

namespace torqueid::nn {
namespace {

void leaky_relu_inplace(Eigen::MatrixXd& z, double slope) {
  z = z.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
}

Eigen::MatrixXd affine(const DenseLayer& layer, const Eigen::MatrixXd& a) {
  Eigen::MatrixXd z = a * layer.weights.transpose();
  z.rowwise() += layer.bias.transpose();
  return z;
}

void check_input(const MlpParams& params, Eigen::Index cols) {
  if (params.layers.empty()) throw ValidationError("network has no layers");
  if (cols != params.input_size()) {
    throw ValidationError("input has " + std::to_string(cols) + " features, network expects " +
                          std::to_string(params.input_size()));
  }
}

}  // namespace

void MlpConfig::validate() const {
  if (layer_sizes.size() < 3) throw ValidationError("network needs input, at least one hidden, and output layer");
  for (int s : layer_sizes) {
    if (s < 1) throw ValidationError("layer sizes must be >= 1");
  }
  if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) throw ValidationError("leaky slope must lie in (0, 1)");
}

std::vector<int> MlpParams::layer_sizes() const {
  std::vector<int> sizes;
  if (layers.empty()) return sizes;
  sizes.push_back(input_size());
  for (const auto& l : layers) sizes.push_back(static_cast<int>(l.weights.rows()));
  return sizes;
}

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

bool MlpParams::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

MlpParams initialize(const MlpConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  MlpParams params;
  params.leaky_slope = config.leaky_slope;
  const std::size_t n_layers = config.layer_sizes.size() - 1;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int fan_in = config.layer_sizes[l];
    const int fan_out = config.layer_sizes[l + 1];
    const bool output_layer = l + 1 == n_layers;
    const double stddev = std::sqrt((output_layer ? 1.0 : 2.0) / fan_in);
    DenseLayer layer;
    layer.weights.resize(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) layer.weights(r, c) = stddev * normal(rng);
    }
    layer.bias = Eigen::VectorXd::Zero(fan_out);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

Eigen::MatrixXd forward_batch(const MlpParams& params, const Eigen::MatrixXd& x) {
  check_input(params, x.cols());
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    a = affine(params.layers[l], a);
    if (l + 1 < params.layers.size()) leaky_relu_inplace(a, params.leaky_slope);
  }
  return a;
}

Eigen::VectorXd forward(const MlpParams& params, const Eigen::VectorXd& x) {
  return forward_batch(params, x.transpose()).transpose();
}

Evaluation mse(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& target) {
  if (target.rows() == 0 || target.cols() == 0) throw ValidationError("mse: empty set");
  if (predicted.rows() != target.rows() || predicted.cols() != target.cols()) {
    throw ValidationError("mse: prediction and target shapes differ");
  }
  const Eigen::ArrayXXd sq = (predicted - target).array().square();
  Evaluation e;
  e.mse = sq.sum() / static_cast<double>(sq.size());
  e.per_column = (sq.colwise().sum() / static_cast<double>(target.rows())).transpose();
  return e;
}

Evaluation evaluate(const MlpParams& params, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.rows() != y.rows()) throw ValidationError("evaluate: input and target row counts differ");
  return mse(forward_batch(params, x), y);
}

LossAndGrad loss_and_grad(const MlpParams& params, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.rows() == 0) throw ValidationError("loss_and_grad: empty batch");
  if (x.rows() != y.rows()) throw ValidationError("loss_and_grad: input and target row counts differ");
  check_input(params, x.cols());
  if (y.cols() != params.output_size()) throw ValidationError("loss_and_grad: target width mismatch");

  const std::size_t n_layers = params.layers.size();
  // pre[l] = pre-activation of layer l; act[l] = input to layer l.
  std::vector<Eigen::MatrixXd> act(n_layers), pre(n_layers);
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < n_layers; ++l) {
    act[l] = a;
    pre[l] = affine(params.layers[l], a);
    a = pre[l];
    if (l + 1 < n_layers) leaky_relu_inplace(a, params.leaky_slope);
  }

  LossAndGrad out;
  out.loss = mse(a, y).mse;
  out.gradients.resize(n_layers);

  Eigen::MatrixXd delta = (a - y) * (2.0 / static_cast<double>(y.size()));
  for (std::size_t l = n_layers; l-- > 0;) {
    out.gradients[l].weights = delta.transpose() * act[l];
    out.gradients[l].bias = delta.colwise().sum().transpose();
    if (l == 0) break;
    delta = delta * params.layers[l].weights;
    const double slope = params.leaky_slope;
    delta.array() *= pre[l - 1].array().unaryExpr([slope](double v) { return v > 0.0 ? 1.0 : slope; });
  }
  return out;
}

}  // namespace torqueid::nn
