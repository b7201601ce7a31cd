#pragma once

#include "torqueid/robot_model.hpp"
#include "torqueid/types.hpp"

namespace torqueid::dynamics {

enum class Friction { Off, On };

/// Joint torques tau = B(q) qdd + C(q, qd) qd + g(q) [+ h(qd)] by the
/// recursive Newton-Euler algorithm. Throws ValidationError naming the
/// first joint with a non-finite entry.
TorqueVector inverse_dynamics(const RobotModel& model, const JointState& state,
                              Friction friction = Friction::On);

/// g(q): inverse dynamics at rest, friction off.
TorqueVector gravity_torque(const RobotModel& model, const Vector6& q);

/// Per joint: zero when |qd| <= dead zone, else viscous*qd + coulomb*sign(qd).
TorqueVector friction_torque(const RobotModel& model, const Vector6& qd);

/// Joint-space inertia matrix, column i = ID(q, 0, e_i) - g(q).
Matrix6 mass_matrix(const RobotModel& model, const Vector6& q);

/// Homogeneous transform from the base to each link frame, and link COM
/// positions in the base frame.
struct LinkPoses {
  std::array<Eigen::Isometry3d, kNumJoints> frames;
  std::array<Eigen::Vector3d, kNumJoints> com;
};
LinkPoses forward_kinematics(const RobotModel& model, const Vector6& q);

}  // namespace torqueid::dynamics
