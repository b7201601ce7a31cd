#include "torqueid/dynamics.hpp"

#include <cmath>
#include <string>

#include "torqueid/errors.hpp"

namespace torqueid::dynamics {
namespace {

using Eigen::Matrix3d;
using Eigen::Vector3d;

struct JointTransform {
  Matrix3d rotation;     // parent -> child axes
  Vector3d translation;  // child origin in parent frame
};

JointTransform joint_transform(const DhJoint& dh, double q) {
  const double theta = dh.theta_offset + q;
  const double ca = std::cos(dh.alpha), sa = std::sin(dh.alpha);
  const double ct = std::cos(theta), st = std::sin(theta);
  JointTransform t;
  t.rotation << ct, -st, 0.0,
                ca * st, ca * ct, -sa,
                sa * st, sa * ct, ca;
  t.translation = {dh.a, -sa * dh.d, ca * dh.d};
  return t;
}

void require_finite(const Vector6& v, const char* what) {
  for (int i = 0; i < kNumJoints; ++i) {
    if (!std::isfinite(v(i))) {
      throw ValidationError(std::string("joint ") + std::to_string(i + 1) + ": non-finite " + what);
    }
  }
}

TorqueVector rnea(const RobotModel& model, const Vector6& q, const Vector6& qd, const Vector6& qdd,
                  const Vector3d& base_acceleration) {
  const Vector3d z = Vector3d::UnitZ();
  std::array<JointTransform, kNumJoints> xf;
  std::array<Vector3d, kNumJoints> force, moment;

  Vector3d omega = Vector3d::Zero();
  Vector3d omega_dot = Vector3d::Zero();
  Vector3d accel = base_acceleration;

  for (int i = 0; i < kNumJoints; ++i) {
    xf[i] = joint_transform(model.joints[i], q(i));
    const Matrix3d rt = xf[i].rotation.transpose();
    const Vector3d& p = xf[i].translation;

    const Vector3d accel_i = rt * (omega_dot.cross(p) + omega.cross(omega.cross(p)) + accel);
    const Vector3d omega_parent = rt * omega;
    const Vector3d omega_i = omega_parent + qd(i) * z;
    const Vector3d omega_dot_i = rt * omega_dot + omega_parent.cross(qd(i) * z) + qdd(i) * z;

    const LinkInertia& link = model.links[i];
    const Vector3d accel_com = omega_dot_i.cross(link.com) + omega_i.cross(omega_i.cross(link.com)) + accel_i;
    force[i] = link.mass * accel_com;
    moment[i] = link.inertia * omega_dot_i + omega_i.cross(link.inertia * omega_i);

    omega = omega_i;
    omega_dot = omega_dot_i;
    accel = accel_i;
  }

  TorqueVector out;
  Vector3d f_child = Vector3d::Zero();
  Vector3d n_child = Vector3d::Zero();
  for (int i = kNumJoints - 1; i >= 0; --i) {
    Vector3d f = force[i];
    Vector3d n = moment[i] + model.links[i].com.cross(force[i]);
    if (i + 1 < kNumJoints) {
      const Vector3d f_in_parent = xf[i + 1].rotation * f_child;
      f += f_in_parent;
      n += xf[i + 1].rotation * n_child + xf[i + 1].translation.cross(f_in_parent);
    }
    out.tau(i) = n.dot(z);
    f_child = f;
    n_child = n;
  }
  return out;
}

}  // namespace

TorqueVector inverse_dynamics(const RobotModel& model, const JointState& state, Friction friction) {
  require_finite(state.q, "position");
  require_finite(state.qd, "velocity");
  require_finite(state.qdd, "acceleration");
  TorqueVector out = rnea(model, state.q, state.qd, state.qdd, -model.gravity);
  if (friction == Friction::On) out.tau += friction_torque(model, state.qd).tau;
  return out;
}

TorqueVector gravity_torque(const RobotModel& model, const Vector6& q) {
  require_finite(q, "position");
  return rnea(model, q, Vector6::Zero(), Vector6::Zero(), -model.gravity);
}

TorqueVector friction_torque(const RobotModel& model, const Vector6& qd) {
  require_finite(qd, "velocity");
  TorqueVector out;
  for (int i = 0; i < kNumJoints; ++i) {
    const JointFriction& f = model.friction[i];
    const double v = qd(i);
    if (std::abs(v) <= f.dead_zone) continue;
    out.tau(i) = f.viscous * v + f.coulomb * (v > 0.0 ? 1.0 : -1.0);
  }
  return out;
}

Matrix6 mass_matrix(const RobotModel& model, const Vector6& q) {
  require_finite(q, "position");
  const TorqueVector g = gravity_torque(model, q);
  Matrix6 b;
  for (int j = 0; j < kNumJoints; ++j) {
    const Vector6 e = Vector6::Unit(j);
    b.col(j) = rnea(model, q, Vector6::Zero(), e, -model.gravity).tau - g.tau;
  }
  return b;
}

LinkPoses forward_kinematics(const RobotModel& model, const Vector6& q) {
  require_finite(q, "position");
  LinkPoses poses;
  Eigen::Isometry3d pose = Eigen::Isometry3d::Identity();
  for (int i = 0; i < kNumJoints; ++i) {
    const JointTransform t = joint_transform(model.joints[i], q(i));
    Eigen::Isometry3d step = Eigen::Isometry3d::Identity();
    step.linear() = t.rotation;
    step.translation() = t.translation;
    pose = pose * step;
    poses.frames[i] = pose;
    poses.com[i] = pose * model.links[i].com;
  }
  return poses;
}

}  // namespace torqueid::dynamics
