#include "torqueid/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "torqueid/digest.hpp"
#include "torqueid/dynamics.hpp"
#include "torqueid/errors.hpp"
#include "torqueid/keyvalue.hpp"

namespace torqueid::acquisition {
namespace {

constexpr double kGridTolerance = 1e-9;

std::string joint_label(int j) { return "joint" + std::to_string(j + 1); }
std::string joint_text(int j) { return "joint " + std::to_string(j + 1); }
std::string group_label(int g) { return std::string("group_") + static_cast<char>('a' + g); }

}  // namespace

std::vector<int> group_joints(JointGroup group) {
  std::vector<int> out;
  for (int j = 0; j < kNumJoints; ++j) {
    if (kJointGroups[j] == group) out.push_back(j);
  }
  return out;
}

char group_name(JointGroup group) { return static_cast<char>('a' + static_cast<int>(group)); }

std::vector<double> grid_points(const JointSweep& sweep) {
  std::vector<double> points{sweep.initial};
  const double span = sweep.final - sweep.initial;
  if (!(sweep.step > 0.0)) return points;
  const double dir = span >= 0.0 ? 1.0 : -1.0;
  const auto whole_steps = static_cast<long>(std::floor(std::abs(span) / sweep.step + kGridTolerance));
  for (long k = 1; k <= whole_steps; ++k) points.push_back(sweep.initial + dir * static_cast<double>(k) * sweep.step);
  if (std::abs(points.back() - sweep.final) > kGridTolerance) points.push_back(sweep.final);
  return points;
}

void SweepSpec::validate(const RobotModel& model) const {
  for (int j = 0; j < kNumJoints; ++j) {
    const JointSweep& s = joints[j];
    if (!std::isfinite(s.initial) || !std::isfinite(s.final) || !(s.step > 0.0) || !std::isfinite(s.step)) {
      throw ValidationError(joint_text(j) + ": step must be positive and angles finite");
    }
    const auto points = grid_points(s);
    if (points.size() < 2) {
      throw ValidationError(joint_text(j) + ": zero-length grid (initial equals final)");
    }
    const JointLimits& lim = model.limits[j];
    for (double p : points) {
      if (p < lim.lower || p > lim.upper) {
        throw ValidationError(joint_text(j) + ": grid target " + format_double(p) + " rad outside limits [" +
                              format_double(lim.lower) + ", " + format_double(lim.upper) + "]");
      }
    }
  }
  for (int g = 0; g < kNumGroups; ++g) {
    if (!(speeds[g].peak_velocity > 0.0) || !(speeds[g].peak_acceleration > 0.0)) {
      throw ValidationError(group_label(g) + ": peak velocity and acceleration must be positive");
    }
  }
  if (!(sample_period > 0.0)) throw ValidationError("sample_period must be positive");
  if (!(noise_sigma >= 0.0) || !(joint6_noise_factor >= 0.0)) {
    throw ValidationError("noise_sigma and joint6_noise_factor must be non-negative");
  }
}

SweepSpec default_sweep() {
  SweepSpec s;
  s.joints = {JointSweep{-1.5, 1.5, 0.1}, JointSweep{-0.8, 0.8, 0.2}, JointSweep{-1.0, 1.0, 0.25},
              JointSweep{-1.5, 1.5, 0.75}, JointSweep{-1.2, 1.2, 0.6}, JointSweep{-1.5, 1.5, 0.75}};
  s.speeds = {GroupSpeed{0.5, 0.8}, GroupSpeed{0.6, 0.6}, GroupSpeed{1.2, 3.0}};
  s.sample_period = 0.01;
  s.noise_sigma = 0.01;
  s.joint6_noise_factor = 10.0;
  return s;
}

SweepSpec parse_sweep(std::string_view text, std::string source) {
  KeyValueFile kv = KeyValueFile::parse(text, std::move(source));
  SweepSpec s;
  for (int j = 0; j < kNumJoints; ++j) {
    const std::string p = joint_label(j) + ".";
    s.joints[j] = {kv.number(p + "initial"), kv.number(p + "final"), kv.number(p + "step")};
  }
  for (int g = 0; g < kNumGroups; ++g) {
    const std::string p = group_label(g) + ".";
    s.speeds[g] = {kv.number(p + "peak_velocity"), kv.number(p + "peak_acceleration")};
  }
  s.sample_period = kv.number("sample_period");
  s.noise_sigma = kv.optional_number("noise_sigma").value_or(s.noise_sigma);
  s.joint6_noise_factor = kv.optional_number("joint6_noise_factor").value_or(s.joint6_noise_factor);
  kv.reject_unknown();
  return s;
}

SweepSpec load_sweep(const std::filesystem::path& path) { return parse_sweep(read_text_file(path), path.string()); }

std::string format_sweep(const SweepSpec& s) {
  std::ostringstream out;
  auto put = [&out](const std::string& key, double v) { out << key << " = " << format_double(v) << '\n'; };
  for (int j = 0; j < kNumJoints; ++j) {
    const std::string p = joint_label(j) + ".";
    put(p + "initial", s.joints[j].initial);
    put(p + "final", s.joints[j].final);
    put(p + "step", s.joints[j].step);
  }
  for (int g = 0; g < kNumGroups; ++g) {
    const std::string p = group_label(g) + ".";
    put(p + "peak_velocity", s.speeds[g].peak_velocity);
    put(p + "peak_acceleration", s.speeds[g].peak_acceleration);
  }
  put("sample_period", s.sample_period);
  put("noise_sigma", s.noise_sigma);
  put("joint6_noise_factor", s.joint6_noise_factor);
  return out.str();
}

std::vector<Move> plan_sweep(const RobotModel& model, const SweepSpec& spec) {
  spec.validate(model);

  Vector6 current;
  for (int j = 0; j < kNumJoints; ++j) current(j) = spec.joints[j].initial;

  std::vector<Move> moves;
  std::size_t clock = 0;
  for (int g = 0; g < kNumGroups; ++g) {
    const auto members = group_joints(static_cast<JointGroup>(g));
    const GroupSpeed speed = spec.speeds[g];
    std::vector<std::vector<double>> grids;
    for (int j : members) grids.push_back(grid_points(spec.joints[j]));

    // Reflected mixed-radix Gray order: the innermost joint that can still
    // step in its current direction moves; exhausted joints reverse.
    std::vector<std::size_t> index(members.size(), 0);
    std::vector<int> direction(members.size(), +1);
    for (;;) {
      bool moved = false;
      for (std::size_t level = members.size(); level-- > 0;) {
        const long next = static_cast<long>(index[level]) + direction[level];
        if (next < 0 || next >= static_cast<long>(grids[level].size())) {
          direction[level] = -direction[level];
          continue;
        }
        index[level] = static_cast<std::size_t>(next);
        const int joint = members[level];

        Move m;
        m.joint = joint;
        m.start_configuration = current;
        m.segment.start = current(joint);
        m.segment.end = grids[level][index[level]];
        m.segment.duration = QuinticSegment::duration_for(m.segment.end - m.segment.start, speed.peak_velocity,
                                                          speed.peak_acceleration);
        m.first_sample = clock;
        m.start_time = static_cast<double>(clock) * spec.sample_period;
        m.sample_count = static_cast<std::size_t>(std::ceil(m.segment.duration / spec.sample_period));
        clock += m.sample_count;
        current(joint) = m.segment.end;
        moves.push_back(m);
        moved = true;
        break;
      }
      if (!moved) break;
    }
  }
  return moves;
}

Dataset generate_grid_sweep(const RobotModel& model, const SweepSpec& spec, std::uint64_t seed) {
  const std::vector<Move> moves = plan_sweep(model, spec);

  Dataset out;
  out.provenance = {seed, sha256_hex(format_sweep(spec)), robot_digest(model)};
  std::size_t total = 0;
  for (const Move& m : moves) total += m.sample_count;
  out.samples.reserve(total);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  for (const Move& m : moves) {
    for (std::size_t k = 0; k < m.sample_count; ++k) {
      const double local = static_cast<double>(k) * spec.sample_period;
      Sample s;
      s.t = static_cast<double>(m.first_sample + k) * spec.sample_period;
      s.state.q = m.start_configuration;
      s.state.q(m.joint) = m.segment.position(local);
      s.state.qd(m.joint) = m.segment.velocity(local);
      s.state.qdd(m.joint) = m.segment.acceleration(local);
      s.torque = dynamics::inverse_dynamics(model, s.state, dynamics::Friction::On);
      for (int j = 0; j < kNumJoints; ++j) {
        const double sigma = spec.noise_for_joint(j);
        if (sigma > 0.0) s.torque.tau(j) += sigma * unit_normal(rng);
      }
      out.samples.push_back(s);
    }
  }
  return out;
}

Dataset shuffle(Dataset dataset, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::shuffle(dataset.samples.begin(), dataset.samples.end(), rng);
  return dataset;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("train fraction must lie in (0, 1), got " + format_double(train_fraction));
  }
  const auto n_train =
      static_cast<std::size_t>(std::floor(static_cast<double>(dataset.size()) * train_fraction));
  Dataset train, test;
  train.provenance = test.provenance = dataset.provenance;
  train.samples.assign(dataset.samples.begin(), dataset.samples.begin() + static_cast<std::ptrdiff_t>(n_train));
  test.samples.assign(dataset.samples.begin() + static_cast<std::ptrdiff_t>(n_train), dataset.samples.end());
  return {std::move(train), std::move(test)};
}

}  // namespace torqueid::acquisition
