#pragma once

#include <string>
#include <string_view>

#include "torqueid/mlp.hpp"

namespace torqueid::nn {

enum class OptimizerKind { SGD, Adam, RMSProp };

std::string to_string(OptimizerKind kind);
/// Accepts "sgd", "adam", "rmsprop" in any case.
OptimizerKind parse_optimizer(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double rho = 0.99;
  double rms_epsilon = 1e-8;

  void validate() const;
};

/// Moment buffers shaped like the parameters; empty until the first step.
struct OptimizerState {
  std::vector<DenseLayer> first;
  std::vector<DenseLayer> second;
  long step = 0;
};

/// One update in place.
///   SGD:     w -= lr * g
///   RMSProp: s = rho*s + (1-rho)*g^2;  w -= lr * g / sqrt(s + eps)
///   Adam:    m, v bias-corrected;      w -= lr * m_hat / (sqrt(v_hat) + eps)
void optimizer_step(MlpParams& params, OptimizerState& state, const Gradients& grads,
                    const OptimizerConfig& config);

}  // namespace torqueid::nn
