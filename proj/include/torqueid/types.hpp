#pragma once

#include <Eigen/Dense>

namespace torqueid {

inline constexpr int kNumJoints = 6;

using Vector6 = Eigen::Matrix<double, kNumJoints, 1>;
using Matrix6 = Eigen::Matrix<double, kNumJoints, kNumJoints>;

/// Joint positions (rad), velocities (rad/s) and accelerations (rad/s^2).
struct JointState {
  Vector6 q = Vector6::Zero();
  Vector6 qd = Vector6::Zero();
  Vector6 qdd = Vector6::Zero();
};

/// Joint torques in N*m.
struct TorqueVector {
  Vector6 tau = Vector6::Zero();
};

}  // namespace torqueid
