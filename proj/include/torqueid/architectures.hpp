#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "torqueid/mlp.hpp"
#include "torqueid/optimizer.hpp"
#include "torqueid/preprocessing.hpp"
#include "torqueid/training.hpp"

namespace torqueid::arch {

enum class ArchitectureKind { Single, Multiple, Cascade };

std::string to_string(ArchitectureKind kind);
ArchitectureKind parse_architecture(std::string_view name);

/// Single: one net over every selected input. Multiple: one net per joint
/// group (a = {1}, b = {2,3}, c = {4,5,6}) seeing only its group's state.
/// Cascade: as Multiple, but each net also receives the predicted torques
/// of the previous group's net (or of every upstream net when
/// `cumulative_feedthrough` is set).
struct ArchitectureSpec {
  ArchitectureKind kind = ArchitectureKind::Single;
  std::vector<int> hidden = {30};  ///< 1 entry for Single, 3 otherwise
  preprocessing::FeaturePolicy policy;
  bool cumulative_feedthrough = false;
  double leaky_slope = nn::kDefaultLeakySlope;
  std::uint64_t seed = 0;  ///< weight initialisation

  void validate() const;
};

/// One network and where its inputs come from. Input vector layout is
/// [upstream predictions (feed_columns) , state features (state_columns)].
struct Subnet {
  std::string name;
  std::vector<int> state_columns;   ///< into the feature-set input columns
  std::vector<int> feed_columns;    ///< into the target columns, predicted upstream
  std::vector<int> output_columns;  ///< into the target columns
  nn::MlpParams params;

  int input_size() const { return static_cast<int>(state_columns.size() + feed_columns.size()); }
};

struct TorqueModel {
  ArchitectureSpec spec;
  std::vector<std::string> input_names;
  std::vector<std::string> target_names;
  std::vector<Subnet> subnets;  ///< in evaluation order
  preprocessing::ScalerStats input_scaler;
  preprocessing::ScalerStats target_scaler;
  bool trained = false;
};

/// Untrained model with initialised weights and identity scalers.
TorqueModel build(const ArchitectureSpec& spec);

struct ArchitectureTraining {
  TorqueModel model;
  std::vector<nn::TrainHistory> subnet_histories;
  /// Per epoch, per-column MSE of all subnets side by side; the scalar MSE
  /// is the mean over every target column.
  nn::TrainHistory combined;
};

/// Fits the scalers on `train` (raw feature units, per the model's policy),
/// then trains the subnets. Multiple trains its nets concurrently;
/// Cascade trains them in order, feeding each trained net's predictions on
/// the train and test rows into the next. No gradient crosses subnets.
ArchitectureTraining train_architecture(TorqueModel model, const preprocessing::FeatureSet& train,
                                        const preprocessing::FeatureSet& test, const nn::OptimizerConfig& opt,
                                        const nn::TrainConfig& tc);

struct Prediction {
  Eigen::MatrixXd scaled;         ///< network output space
  Eigen::MatrixXd newton_meters;  ///< inverse-transformed torques
};

/// Rows of raw feature-selected inputs in, torques out.
Prediction predict(const TorqueModel& model, const Eigen::MatrixXd& raw_inputs);
Prediction predict(const TorqueModel& model, const Eigen::VectorXd& raw_row);

/// Forward through the wiring in scaled space, without the scalers.
Eigen::MatrixXd predict_scaled(const TorqueModel& model, const Eigen::MatrixXd& scaled_inputs);

}  // namespace torqueid::arch
