#include "torqueid/training.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "torqueid/errors.hpp"

namespace torqueid::nn {

void TrainConfig::validate(std::size_t train_rows) const {
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
  if (batch_size > train_rows) {
    throw ValidationError("batch size " + std::to_string(batch_size) + " exceeds training set size " +
                          std::to_string(train_rows));
  }
}

double TrainHistory::average_test_mse() const {
  if (test_mse.empty()) return std::nan("");
  return std::accumulate(test_mse.begin(), test_mse.end(), 0.0) / static_cast<double>(test_mse.size());
}

TrainResult fit(MlpParams params, const Eigen::MatrixXd& train_x, const Eigen::MatrixXd& train_y,
                const Eigen::MatrixXd& test_x, const Eigen::MatrixXd& test_y, const OptimizerConfig& opt,
                const TrainConfig& tc) {
  if (train_x.rows() == 0 || test_x.rows() == 0) throw ValidationError("train and test sets must be non-empty");
  if (train_x.rows() != train_y.rows() || test_x.rows() != test_y.rows()) {
    throw ValidationError("input and target row counts differ");
  }
  opt.validate();
  const auto n = static_cast<std::size_t>(train_x.rows());
  tc.validate(n);
  const std::size_t batch = tc.batch_size == 0 ? n : tc.batch_size;

  std::mt19937_64 rng(tc.seed);
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  TrainResult result;
  OptimizerState state;
  Eigen::MatrixXd bx, by;
  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    if (tc.shuffle_each_epoch) std::shuffle(order.begin(), order.end(), rng);

    for (std::size_t begin = 0; begin < n; begin += batch) {
      const std::size_t end = std::min(n, begin + batch);
      const std::vector<Eigen::Index> rows(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                           order.begin() + static_cast<std::ptrdiff_t>(end));
      bx = train_x(rows, Eigen::all);
      by = train_y(rows, Eigen::all);
      const LossAndGrad lg = loss_and_grad(params, bx, by);
      optimizer_step(params, state, lg.gradients, opt);
    }

    const Evaluation train_eval = evaluate(params, train_x, train_y);
    if (!std::isfinite(train_eval.mse) || !params.all_finite()) throw TrainingDiverged(epoch);
    const Evaluation test_eval = evaluate(params, test_x, test_y);

    result.history.train_mse.push_back(train_eval.mse);
    result.history.test_mse.push_back(test_eval.mse);
    result.history.train_mse_columns.push_back(train_eval.per_column);
    result.history.test_mse_columns.push_back(test_eval.per_column);
    result.history.epoch_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count());
  }
  result.params = std::move(params);
  return result;
}

TrainResult train(const MlpConfig& config, const Eigen::MatrixXd& train_x, const Eigen::MatrixXd& train_y,
                  const Eigen::MatrixXd& test_x, const Eigen::MatrixXd& test_y, const OptimizerConfig& opt,
                  const TrainConfig& tc) {
  return fit(initialize(config), train_x, train_y, test_x, test_y, opt, tc);
}

}  // namespace torqueid::nn
