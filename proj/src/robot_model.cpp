#include "torqueid/robot_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "torqueid/digest.hpp"
#include "torqueid/errors.hpp"
#include "torqueid/keyvalue.hpp"

namespace torqueid {
namespace {

std::string joint_key(int i, const char* field) { return "joint" + std::to_string(i + 1) + "." + field; }
std::string link_key(int i, const char* field) { return "link" + std::to_string(i + 1) + "." + field; }

Eigen::Matrix3d inertia(double ixx, double iyy, double izz, double ixy = 0.0, double ixz = 0.0,
                        double iyz = 0.0) {
  Eigen::Matrix3d m;
  m << ixx, ixy, ixz, ixy, iyy, iyz, ixz, iyz, izz;
  return m;
}

}  // namespace

void RobotModel::validate() const {
  for (int i = 0; i < kNumJoints; ++i) {
    const std::string name = "link" + std::to_string(i + 1);
    const LinkInertia& link = links[i];
    if (!(link.mass > 0.0) || !std::isfinite(link.mass)) {
      throw ValidationError(name + ": mass must be positive");
    }
    if (!link.com.allFinite() || !link.inertia.allFinite()) {
      throw ValidationError(name + ": non-finite inertial parameter");
    }
    const double scale = std::max(1.0, link.inertia.cwiseAbs().maxCoeff());
    if ((link.inertia - link.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw ValidationError(name + ": inertia tensor is not symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(link.inertia);
    const Eigen::Vector3d p = eig.eigenvalues();  // ascending
    if (!(p(0) > 0.0)) throw ValidationError(name + ": inertia tensor is not positive-definite");
    if (p(0) + p(1) < p(2) * (1.0 - 1e-12)) {
      throw ValidationError(name + ": principal moments violate the triangle inequality");
    }

    const std::string joint = "joint " + std::to_string(i + 1);
    const DhJoint& dh = joints[i];
    if (!std::isfinite(dh.a) || !std::isfinite(dh.alpha) || !std::isfinite(dh.d) ||
        !std::isfinite(dh.theta_offset)) {
      throw ValidationError(joint + ": non-finite DH parameter");
    }
    const JointFriction& f = friction[i];
    if (!(f.viscous >= 0.0) || !(f.coulomb >= 0.0) || !(f.dead_zone >= 0.0)) {
      throw ValidationError(joint + ": friction parameters must be non-negative");
    }
    if (!(limits[i].lower < limits[i].upper)) {
      throw ValidationError(joint + ": position limits must satisfy q_min < q_max");
    }
  }
  if (!gravity.allFinite()) throw ValidationError("gravity: non-finite component");
}

RobotModel default_robot() {
  using std::numbers::pi;
  RobotModel m;
  m.gravity = {0.0, 0.0, -9.81};

  // Shoulder height 0.45 m, shoulder offset 0.15 m, upper arm 0.40 m,
  // forearm 0.40 m with 0.05 m elbow offset, flange 0.08 m past the wrist.
  m.joints = {DhJoint{0.0, 0.0, 0.45, 0.0},      DhJoint{0.15, -pi / 2, 0.0, -pi / 2},
              DhJoint{0.40, 0.0, 0.0, 0.0},      DhJoint{0.05, -pi / 2, 0.40, 0.0},
              DhJoint{0.0, pi / 2, 0.0, 0.0},    DhJoint{0.0, -pi / 2, 0.08, 0.0}};

  m.links[0] = {15.0, {0.0, 0.02, -0.10}, inertia(0.30, 0.28, 0.20)};
  m.links[1] = {10.0, {0.20, 0.0, 0.03}, inertia(0.020, 0.145, 0.142)};
  m.links[2] = {5.0, {0.04, 0.17, 0.0}, inertia(0.070, 0.0065, 0.069)};
  m.links[3] = {3.0, {0.0, 0.0, -0.08}, inertia(0.020, 0.020, 0.0050)};
  m.links[4] = {2.0, {0.0, -0.02, 0.0}, inertia(0.0040, 0.0035, 0.0030)};
  m.links[5] = {0.5, {0.0, 0.0, 0.02}, inertia(0.00050, 0.00050, 0.00040)};

  m.friction = {JointFriction{3.0, 4.0, 0.02}, JointFriction{2.5, 3.5, 0.02},
                JointFriction{1.5, 2.0, 0.02}, JointFriction{0.5, 0.8, 0.02},
                JointFriction{0.4, 0.6, 0.02}, JointFriction{0.2, 0.3, 0.02}};

  m.limits = {JointLimits{-2.9, 2.9}, JointLimits{-1.9, 1.9}, JointLimits{-2.4, 2.4},
              JointLimits{-3.0, 3.0}, JointLimits{-2.0, 2.0}, JointLimits{-3.0, 3.0}};
  return m;
}

RobotModel parse_robot(std::string_view text, std::string source) {
  KeyValueFile kv = KeyValueFile::parse(text, std::move(source));
  RobotModel m;
  m.gravity = {kv.number("gravity.x"), kv.number("gravity.y"), kv.number("gravity.z")};
  for (int i = 0; i < kNumJoints; ++i) {
    m.joints[i] = {kv.number(joint_key(i, "a")), kv.number(joint_key(i, "alpha")),
                   kv.number(joint_key(i, "d")), kv.number(joint_key(i, "theta_offset"))};
    m.friction[i] = {kv.number(joint_key(i, "viscous")), kv.number(joint_key(i, "coulomb")),
                     kv.number(joint_key(i, "dead_zone"))};
    m.limits[i] = {kv.number(joint_key(i, "q_min")), kv.number(joint_key(i, "q_max"))};

    LinkInertia& link = m.links[i];
    link.mass = kv.number(link_key(i, "mass"));
    link.com = {kv.number(link_key(i, "com_x")), kv.number(link_key(i, "com_y")),
                kv.number(link_key(i, "com_z"))};
    link.inertia = inertia(kv.number(link_key(i, "ixx")), kv.number(link_key(i, "iyy")),
                           kv.number(link_key(i, "izz")), kv.number(link_key(i, "ixy")),
                           kv.number(link_key(i, "ixz")), kv.number(link_key(i, "iyz")));
  }
  kv.reject_unknown();
  m.validate();
  return m;
}

RobotModel load_robot(const std::filesystem::path& path) {
  return parse_robot(read_text_file(path), path.string());
}

std::string format_robot(const RobotModel& m) {
  std::ostringstream out;
  auto put = [&out](const std::string& key, double v) { out << key << " = " << format_double(v) << '\n'; };
  put("gravity.x", m.gravity.x());
  put("gravity.y", m.gravity.y());
  put("gravity.z", m.gravity.z());
  for (int i = 0; i < kNumJoints; ++i) {
    put(joint_key(i, "a"), m.joints[i].a);
    put(joint_key(i, "alpha"), m.joints[i].alpha);
    put(joint_key(i, "d"), m.joints[i].d);
    put(joint_key(i, "theta_offset"), m.joints[i].theta_offset);
    put(joint_key(i, "viscous"), m.friction[i].viscous);
    put(joint_key(i, "coulomb"), m.friction[i].coulomb);
    put(joint_key(i, "dead_zone"), m.friction[i].dead_zone);
    put(joint_key(i, "q_min"), m.limits[i].lower);
    put(joint_key(i, "q_max"), m.limits[i].upper);
    const LinkInertia& l = m.links[i];
    put(link_key(i, "mass"), l.mass);
    put(link_key(i, "com_x"), l.com.x());
    put(link_key(i, "com_y"), l.com.y());
    put(link_key(i, "com_z"), l.com.z());
    put(link_key(i, "ixx"), l.inertia(0, 0));
    put(link_key(i, "iyy"), l.inertia(1, 1));
    put(link_key(i, "izz"), l.inertia(2, 2));
    put(link_key(i, "ixy"), l.inertia(0, 1));
    put(link_key(i, "ixz"), l.inertia(0, 2));
    put(link_key(i, "iyz"), l.inertia(1, 2));
  }
  return out.str();
}

std::string robot_digest(const RobotModel& model) { return sha256_hex(format_robot(model)); }

}  // namespace torqueid
