#pragma once

#include <cstdint>
#include <vector>

#include "torqueid/mlp.hpp"
#include "torqueid/optimizer.hpp"

namespace torqueid::nn {

struct TrainConfig {
  int epochs = 10;
  /// Rows per mini-batch; 0 selects full-batch training.
  std::size_t batch_size = 64;
  bool shuffle_each_epoch = true;
  std::uint64_t seed = 0;

  void validate(std::size_t train_rows) const;
};

/// One entry per epoch, recorded after the epoch's last update.
struct TrainHistory {
  std::vector<double> train_mse;
  std::vector<double> test_mse;
  std::vector<Eigen::VectorXd> train_mse_columns;
  std::vector<Eigen::VectorXd> test_mse_columns;
  /// Wall-clock; excluded from every determinism comparison.
  std::vector<double> epoch_seconds;

  std::size_t epochs() const { return test_mse.size(); }
  /// Mean of the per-epoch test MSE values.
  double average_test_mse() const;
};

struct TrainResult {
  MlpParams params;
  TrainHistory history;
};

/// Mini-batch training from the given starting parameters. Throws
/// TrainingDiverged when an epoch ends with a non-finite training loss.
TrainResult fit(MlpParams params, const Eigen::MatrixXd& train_x, const Eigen::MatrixXd& train_y,
                const Eigen::MatrixXd& test_x, const Eigen::MatrixXd& test_y, const OptimizerConfig& opt,
                const TrainConfig& tc);

/// `fit(initialize(config), ...)`.
TrainResult train(const MlpConfig& config, const Eigen::MatrixXd& train_x, const Eigen::MatrixXd& train_y,
                  const Eigen::MatrixXd& test_x, const Eigen::MatrixXd& test_y, const OptimizerConfig& opt,
                  const TrainConfig& tc);

}  // namespace torqueid::nn
