#include "torqueid/preprocessing.hpp"

#include <cctype>
#include <cmath>

#include "torqueid/errors.hpp"

namespace torqueid::preprocessing {

std::vector<std::string> input_names(const FeaturePolicy& policy) {
  std::vector<std::string> names;
  for (const char* prefix : {"q", "dq", "ddq"}) {
    for (int j = 1; j <= kNumJoints; ++j) {
      const bool is_q1 = j == 1 && std::string(prefix) == "q";
      if (is_q1 && policy.drop_q1) continue;
      if (j == kNumJoints && policy.drop_joint6) continue;
      names.push_back(prefix + std::to_string(j));
    }
  }
  return names;
}

std::vector<std::string> target_names(const FeaturePolicy& policy) {
  std::vector<std::string> names;
  for (int j = 1; j <= kNumJoints; ++j) {
    if (j == kNumJoints && policy.drop_joint6) continue;
    names.push_back("tau" + std::to_string(j));
  }
  return names;
}

int joint_of_column(const std::string& name) {
  if (name.empty() || !std::isdigit(static_cast<unsigned char>(name.back()))) {
    throw ValidationError("column '" + name + "' does not name a joint");
  }
  return name.back() - '0';
}

FeatureSet select_features(const acquisition::Dataset& dataset, const FeaturePolicy& policy) {
  FeatureSet out;
  out.input_names = input_names(policy);
  out.target_names = target_names(policy);
  const auto n = static_cast<Eigen::Index>(dataset.size());
  out.inputs.resize(n, static_cast<Eigen::Index>(out.input_names.size()));
  out.targets.resize(n, static_cast<Eigen::Index>(out.target_names.size()));

  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& s = dataset.samples[static_cast<std::size_t>(r)];
    Eigen::Index c = 0;
    for (const Vector6* v : {&s.state.q, &s.state.qd, &s.state.qdd}) {
      for (int j = 0; j < kNumJoints; ++j) {
        if (v == &s.state.q && j == 0 && policy.drop_q1) continue;
        if (j == kNumJoints - 1 && policy.drop_joint6) continue;
        out.inputs(r, c++) = (*v)(j);
      }
    }
    for (Eigen::Index t = 0; t < out.targets.cols(); ++t) out.targets(r, t) = s.torque.tau(t);
  }
  return out;
}

ScalerStats fit_scaler(const Eigen::MatrixXd& features, std::vector<std::string> names) {
  if (features.rows() == 0 || features.cols() == 0) throw ValidationError("fit_scaler: empty input");
  if (features.rows() < 2) throw ValidationError("fit_scaler: need at least 2 rows");
  if (names.empty()) {
    for (Eigen::Index c = 0; c < features.cols(); ++c) names.push_back("x" + std::to_string(c + 1));
  }
  if (static_cast<Eigen::Index>(names.size()) != features.cols()) {
    throw ValidationError("fit_scaler: name count does not match column count");
  }

  ScalerStats stats;
  stats.names = std::move(names);
  stats.mean = features.colwise().mean().transpose();
  const auto n = static_cast<double>(features.rows());
  stats.stddev = ((features.rowwise() - stats.mean.transpose()).array().square().colwise().sum() / n)
                     .sqrt()
                     .transpose();
  for (Eigen::Index c = 0; c < stats.stddev.size(); ++c) {
    if (!(stats.stddev(c) >= kStddevGuard)) {
      stats.stddev(c) = 1.0;
      stats.guarded.push_back(stats.names[static_cast<std::size_t>(c)]);
    }
  }
  return stats;
}

ScalerStats identity_scaler(std::vector<std::string> names) {
  ScalerStats stats;
  const auto n = static_cast<Eigen::Index>(names.size());
  stats.names = std::move(names);
  stats.mean = Eigen::VectorXd::Zero(n);
  stats.stddev = Eigen::VectorXd::Ones(n);
  return stats;
}

namespace {
void check_columns(const ScalerStats& stats, const Eigen::MatrixXd& x) {
  if (x.cols() != stats.size()) {
    throw ValidationError("scaler expects " + std::to_string(stats.size()) + " columns, got " +
                          std::to_string(x.cols()));
  }
}
}  // namespace

Eigen::MatrixXd transform(const ScalerStats& stats, const Eigen::MatrixXd& x) {
  check_columns(stats, x);
  return ((x.rowwise() - stats.mean.transpose()).array().rowwise() / stats.stddev.transpose().array()).matrix();
}

Eigen::MatrixXd inverse_transform(const ScalerStats& stats, const Eigen::MatrixXd& xn) {
  check_columns(stats, xn);
  return ((xn.array().rowwise() * stats.stddev.transpose().array()).rowwise() + stats.mean.transpose().array())
      .matrix();
}

}  // namespace torqueid::preprocessing
