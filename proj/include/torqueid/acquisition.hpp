#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "torqueid/robot_model.hpp"
#include "torqueid/trajectory.hpp"
#include "torqueid/types.hpp"

namespace torqueid::acquisition {

/// Orthogonal-motion joint groups: a = {1}, b = {2, 3}, c = {4, 5, 6}.
enum class JointGroup { A = 0, B = 1, C = 2 };
inline constexpr int kNumGroups = 3;
inline constexpr std::array<JointGroup, kNumJoints> kJointGroups = {
    JointGroup::A, JointGroup::B, JointGroup::B, JointGroup::C, JointGroup::C, JointGroup::C};

/// Zero-based joint indices belonging to `group`, in joint order.
std::vector<int> group_joints(JointGroup group);
char group_name(JointGroup group);

struct JointSweep {
  double initial = 0.0;  ///< rad
  double final = 0.0;    ///< rad
  double step = 0.1;     ///< rad, > 0
};

struct GroupSpeed {
  double peak_velocity = 0.5;      ///< rad/s
  double peak_acceleration = 1.0;  ///< rad/s^2
};

struct SweepSpec {
  std::array<JointSweep, kNumJoints> joints{};
  std::array<GroupSpeed, kNumGroups> speeds{};
  double sample_period = 0.01;         ///< s
  double noise_sigma = 0.01;           ///< N*m, base torque noise
  double joint6_noise_factor = 10.0;   ///< joint 6 gets factor * noise_sigma

  /// Throws ValidationError naming the joint for a non-positive step, an
  /// empty grid, or a grid point outside the model's limits.
  void validate(const RobotModel& model) const;

  /// Standard deviation of the torque noise on joint `j` (zero-based).
  double noise_for_joint(int j) const { return j == kNumJoints - 1 ? noise_sigma * joint6_noise_factor : noise_sigma; }
};

/// Grid points from `initial` towards `final` in `step` increments,
/// including both ends. The last increment is shortened when the range is
/// not a multiple of the step.
std::vector<double> grid_points(const JointSweep& sweep);

SweepSpec default_sweep();
SweepSpec load_sweep(const std::filesystem::path& path);
SweepSpec parse_sweep(std::string_view text, std::string source = "<string>");
std::string format_sweep(const SweepSpec& spec);

struct Sample {
  double t = 0.0;  ///< s
  JointState state;
  TorqueVector torque;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string sweep_digest;
  std::string robot_digest;
};

struct Dataset {
  std::vector<Sample> samples;
  Provenance provenance;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

/// One point-to-point move of a single joint.
struct Move {
  int joint = 0;
  QuinticSegment segment;
  Vector6 start_configuration = Vector6::Zero();
  double start_time = 0.0;       ///< s, first sample instant of this move
  std::size_t first_sample = 0;  ///< global index of that instant
  std::size_t sample_count = 0;  ///< ceil(duration / sample_period)
};

/// The full motion schedule. Groups run a -> b -> c. Within a group the
/// member joints trace their grid in serpentine order, one joint moving per
/// segment and never returning to the start between targets. Joints outside
/// the active group hold their last position.
std::vector<Move> plan_sweep(const RobotModel& model, const SweepSpec& spec);

/// Samples every move of `plan_sweep` at the fixed rate; torque is the
/// friction-on inverse dynamics plus Gaussian noise.
Dataset generate_grid_sweep(const RobotModel& model, const SweepSpec& spec, std::uint64_t seed);

/// Deterministic permutation of the samples.
Dataset shuffle(Dataset dataset, std::uint64_t seed);

/// First floor(n * train_fraction) rows train, rest test.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction);

}  // namespace torqueid::acquisition
