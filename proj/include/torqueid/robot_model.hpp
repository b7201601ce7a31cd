#pragma once

#include <array>
#include <filesystem>
#include <string>

#include "torqueid/types.hpp"

namespace torqueid {

/// Joint placement in the modified (Craig) Denavit-Hartenberg convention.
///
/// Frame i is attached to link i with z_i along joint axis i. The transform
/// from frame i-1 to frame i is
///
///     Rot_x(alpha) * Trans_x(a) * Rot_z(theta_offset + q_i) * Trans_z(d)
///
/// so `a` and `alpha` describe the common normal between axes i-1 and i,
/// expressed in frame i-1 (frame 0 is the base).
///
///         z_{i-1}            z_i
///           |                 |
///           |----- a -------->|   (along x_{i-1})
///           |   alpha about x_{i-1} tilts z_i
///           o                 o---> x_i  (rotated by theta about z_i)
struct DhJoint {
  double a = 0.0;             ///< m
  double alpha = 0.0;         ///< rad
  double d = 0.0;             ///< m
  double theta_offset = 0.0;  ///< rad
};

struct LinkInertia {
  double mass = 0.0;                               ///< kg
  Eigen::Vector3d com = Eigen::Vector3d::Zero();   ///< m, in the link frame
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();  ///< kg*m^2 about the COM, link axes
};

/// Viscous + Coulomb friction with a symmetric velocity dead zone.
struct JointFriction {
  double viscous = 0.0;    ///< N*m*s/rad
  double coulomb = 0.0;    ///< N*m
  double dead_zone = 0.0;  ///< rad/s half-width
};

struct JointLimits {
  double lower = -3.14159;  ///< rad
  double upper = 3.14159;   ///< rad
};

/// Kinematic, inertial and friction parameters of a 6-joint revolute chain.
struct RobotModel {
  std::array<DhJoint, kNumJoints> joints{};
  std::array<LinkInertia, kNumJoints> links{};
  std::array<JointFriction, kNumJoints> friction{};
  std::array<JointLimits, kNumJoints> limits{};
  Eigen::Vector3d gravity{0.0, 0.0, -9.81};  ///< m/s^2 in the base frame

  /// Throws ValidationError when a mass is not positive, an inertia tensor
  /// is not symmetric positive-definite or violates the triangle inequality
  /// on principal moments, a friction parameter is negative, or limits are
  /// unordered. The dynamics routines do not call this: reduced test chains
  /// with massless links are legitimate inputs to them.
  void validate() const;
};

/// Synthetic anthropomorphic arm (link masses 15/10/5/3/2/0.5 kg).
/// Not a model of any real robot.
RobotModel default_robot();

/// Reads the key-value robot format (see data/robot_default.txt).
/// Unknown or missing keys are rejected; the result is validated.
RobotModel load_robot(const std::filesystem::path& path);
RobotModel parse_robot(std::string_view text, std::string source = "<string>");

/// Writes every key of the robot format, full precision.
std::string format_robot(const RobotModel& model);

/// SHA-256 of `format_robot(model)`.
std::string robot_digest(const RobotModel& model);

}  // namespace torqueid
