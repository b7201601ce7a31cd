#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "torqueid/acquisition.hpp"
#include "torqueid/architectures.hpp"
#include "torqueid/model_io.hpp"
#include "torqueid/tpe.hpp"

namespace torqueid::experiment {

namespace fs = std::filesystem;

/// Process exit codes of the command-line front end.
enum ExitCode : int { kSuccess = 0, kIoFailure = 1, kInvalidInput = 2, kNumericalFailure = 3 };

/// Maps the library's exception types onto exit codes and prints the
/// diagnostic to `err`.
int exit_code_for_current_exception(std::ostream& err);

// ---------------------------------------------------------------- gen-data

struct GenDataOptions {
  std::optional<fs::path> robot_path;  ///< default_robot() when absent
  std::optional<fs::path> sweep_path;  ///< default_sweep() when absent
  fs::path out;
  std::uint64_t seed = 0;
  bool shuffle = true;
};

struct GenDataResult {
  std::size_t rows = 0;
  double duration_seconds = 0.0;  ///< simulated acquisition time
  std::string csv_sha256;
};

GenDataResult gen_data(const GenDataOptions& options, std::ostream& log);

// ------------------------------------------------------------------- train

/// Everything that defines one training run on a dataset.
struct RunConfig {
  arch::ArchitectureKind architecture = arch::ArchitectureKind::Single;
  bool scale = true;
  int epochs = 10;
  std::vector<int> hidden;  ///< empty: 30 (single), 5/15/30 (multiple), 30/30/30 (cascade)
  nn::OptimizerKind optimizer = nn::OptimizerKind::Adam;
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  bool drop_q1 = true;
  bool drop_joint6 = false;
  bool cumulative_feedthrough = false;
  double train_fraction = 0.7;

  std::vector<int> resolved_hidden() const;
};

struct RunOutcome {
  arch::ArchitectureTraining training;
  Json metrics;  ///< torqueid.metrics/1 document
  Eigen::MatrixXd test_actual_nm;
  Eigen::MatrixXd test_predicted_nm;
};

/// Split, feature selection, scaling, training and evaluation. Reported MSEs
/// are in standardized target units using statistics of the train split,
/// whether or not the model itself was trained on scaled targets.
RunOutcome run_training(const acquisition::Dataset& data, const std::string& data_sha256, const RunConfig& config);

struct TrainOptions {
  fs::path data;
  RunConfig run;
  std::string tag = "baseline";
  std::optional<fs::path> model_out;
  std::optional<fs::path> metrics_out;
  std::optional<fs::path> predictions_out;
  std::size_t prediction_rows = 500;
};

Json cmd_train(const TrainOptions& options, std::ostream& log);

/// Applies a saved model to every row of a dataset and writes the
/// actual/predicted CSV used by cmd_plot. Returns the row count.
std::size_t cmd_predict(const fs::path& model, const fs::path& data, const fs::path& out, std::ostream& log);

// --------------------------------------------------------------------- hpo

struct HpoOptions {
  fs::path data;
  RunConfig base;  ///< hidden, optimizer and learning rate are searched
  int trials = 10;
  std::uint64_t study_seed = 0;
  hpo::TpeSettings settings;
  std::optional<fs::path> out;
};

/// Objective: mean per-epoch test MSE. Every trial trains with
/// `base.seed`, so trials differ only in hyperparameters.
Json cmd_hpo(const HpoOptions& options, std::ostream& log);

/// One Table-III style line: "cascade | 26, 36, 48 | adam | 1.651993e-03".
std::string format_best_assignment(const Json& study);

// ------------------------------------------------------------------ report

inline constexpr const char* kReportHeader =
    "arch,scaling,avg_test_mse,full_test_mse,hidden,optimizer,lr,source,delta_full_test_mse";

/// One row per metrics file or study (best trial). delta is
/// optimized - baseline full test MSE against the baseline with the same
/// architecture and scaling, blank where not applicable.
std::string cmd_report(const std::vector<fs::path>& inputs, const std::optional<fs::path>& out, std::ostream& log);

// -------------------------------------------------------------------- plot

struct PlotResult {
  std::size_t panels = 0;
  std::size_t rows = 0;  ///< data rows in the CSV sidecar
  fs::path sidecar;
};

/// A metrics document (.json) gives the train/test loss curves; a
/// predictions file (.csv) gives one actual-vs-predicted panel per joint.
/// The plotted numbers are written next to `out` with a .csv extension.
PlotResult cmd_plot(const fs::path& input, const fs::path& out, std::ostream& log);

}  // namespace torqueid::experiment
