#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "torqueid/acquisition.hpp"

namespace torqueid::preprocessing {

/// Which dataset columns become network inputs/targets and whether they are
/// standardized. Input dimension is 18, 17 (no q1), 15 (no joint-6 state)
/// or 14 (both).
struct FeaturePolicy {
  bool drop_q1 = true;
  bool drop_joint6 = false;
  bool standardize_inputs = true;
  bool standardize_targets = true;

  int input_dimension() const { return 18 - (drop_q1 ? 1 : 0) - (drop_joint6 ? 3 : 0); }
  int target_dimension() const { return drop_joint6 ? 5 : 6; }
};

/// Input column order: q1..q6, dq1..dq6, ddq1..ddq6 with dropped columns
/// removed. Targets: tau1..tau6 (tau6 removed with drop_joint6).
std::vector<std::string> input_names(const FeaturePolicy& policy);
std::vector<std::string> target_names(const FeaturePolicy& policy);

/// One-based joint number parsed from a column name such as "ddq4".
int joint_of_column(const std::string& name);

/// Rows are samples.
struct FeatureSet {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd targets;
  std::vector<std::string> input_names;
  std::vector<std::string> target_names;

  Eigen::Index rows() const { return inputs.rows(); }
};

/// Pure column projection of the dataset.
FeatureSet select_features(const acquisition::Dataset& dataset, const FeaturePolicy& policy);

/// Per-feature mean and population standard deviation.
struct ScalerStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
  std::vector<std::string> names;
  /// Features whose deviation fell below the guard and was replaced by 1.
  std::vector<std::string> guarded;

  Eigen::Index size() const { return mean.size(); }
};

inline constexpr double kStddevGuard = 1e-12;

/// Needs at least 2 rows. Deviations below kStddevGuard are replaced by 1.
ScalerStats fit_scaler(const Eigen::MatrixXd& features, std::vector<std::string> names = {});

/// Mean 0, deviation 1: the no-op scaler.
ScalerStats identity_scaler(std::vector<std::string> names);

Eigen::MatrixXd transform(const ScalerStats& stats, const Eigen::MatrixXd& x);
Eigen::MatrixXd inverse_transform(const ScalerStats& stats, const Eigen::MatrixXd& xn);

}  // namespace torqueid::preprocessing
