#include "torqueid/optimizer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "torqueid/errors.hpp"

namespace torqueid::nn {

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::SGD: return "sgd";
    case OptimizerKind::Adam: return "adam";
    case OptimizerKind::RMSProp: return "rmsprop";
  }
  return "unknown";
}

OptimizerKind parse_optimizer(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "sgd") return OptimizerKind::SGD;
  if (lower == "adam") return OptimizerKind::Adam;
  if (lower == "rmsprop") return OptimizerKind::RMSProp;
  throw ValidationError("unknown optimizer '" + std::string(name) + "' (expected sgd, adam or rmsprop)");
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ValidationError("learning rate must be > 0");
  for (double c : {beta1, beta2, rho}) {
    if (!(c > 0.0 && c < 1.0)) throw ValidationError("moment coefficients must lie in (0, 1)");
  }
  if (!(adam_epsilon > 0.0) || !(rms_epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
}

namespace {

std::vector<DenseLayer> zeros_like(const MlpParams& params) {
  std::vector<DenseLayer> z;
  for (const auto& l : params.layers) {
    z.push_back({Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()), Eigen::VectorXd::Zero(l.bias.size())});
  }
  return z;
}

template <typename Param, typename Grad, typename Buf>
void rmsprop_update(Param& w, const Grad& g, Buf& s, const OptimizerConfig& c) {
  s = c.rho * s.array() + (1.0 - c.rho) * g.array().square();
  w.array() -= c.learning_rate * g.array() / (s.array() + c.rms_epsilon).sqrt();
}

template <typename Param, typename Grad, typename Buf>
void adam_update(Param& w, const Grad& g, Buf& m, Buf& v, double bc1, double bc2, const OptimizerConfig& c) {
  m = c.beta1 * m.array() + (1.0 - c.beta1) * g.array();
  v = c.beta2 * v.array() + (1.0 - c.beta2) * g.array().square();
  w.array() -= c.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + c.adam_epsilon);
}

}  // namespace

void optimizer_step(MlpParams& params, OptimizerState& state, const Gradients& grads,
                    const OptimizerConfig& config) {
  if (grads.size() != params.layers.size()) throw ValidationError("gradient layer count mismatch");
  if (config.kind != OptimizerKind::SGD && state.first.empty()) {
    state.first = zeros_like(params);
    state.second = zeros_like(params);
  }
  ++state.step;

  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));

  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    DenseLayer& p = params.layers[l];
    const DenseLayer& g = grads[l];
    switch (config.kind) {
      case OptimizerKind::SGD:
        p.weights -= config.learning_rate * g.weights;
        p.bias -= config.learning_rate * g.bias;
        break;
      case OptimizerKind::RMSProp:
        rmsprop_update(p.weights, g.weights, state.second[l].weights, config);
        rmsprop_update(p.bias, g.bias, state.second[l].bias, config);
        break;
      case OptimizerKind::Adam:
        adam_update(p.weights, g.weights, state.first[l].weights, state.second[l].weights, bc1, bc2, config);
        adam_update(p.bias, g.bias, state.first[l].bias, state.second[l].bias, bc1, bc2, config);
        break;
    }
  }
}

}  // namespace torqueid::nn
