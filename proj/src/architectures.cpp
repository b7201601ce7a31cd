#include "torqueid/architectures.hpp"

#include <algorithm>
#include <cctype>
#include <future>

#include "torqueid/acquisition.hpp"
#include "torqueid/errors.hpp"
#include "torqueid/seeding.hpp"

namespace torqueid::arch {

using preprocessing::FeatureSet;

std::string to_string(ArchitectureKind kind) {
  switch (kind) {
    case ArchitectureKind::Single: return "single";
    case ArchitectureKind::Multiple: return "multiple";
    case ArchitectureKind::Cascade: return "cascade";
  }
  return "unknown";
}

ArchitectureKind parse_architecture(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "single") return ArchitectureKind::Single;
  if (lower == "multiple") return ArchitectureKind::Multiple;
  if (lower == "cascade") return ArchitectureKind::Cascade;
  throw ValidationError("unknown architecture '" + std::string(name) + "' (expected single, multiple or cascade)");
}

void ArchitectureSpec::validate() const {
  const std::size_t expected = kind == ArchitectureKind::Single ? 1 : 3;
  if (hidden.size() != expected) {
    throw ValidationError(to_string(kind) + " architecture needs " + std::to_string(expected) +
                          " hidden size(s), got " + std::to_string(hidden.size()));
  }
  for (int h : hidden) {
    if (h < 1) throw ValidationError("hidden sizes must be >= 1");
  }
}

namespace {

bool in_group(int joint_one_based, acquisition::JointGroup g) {
  return acquisition::kJointGroups[static_cast<std::size_t>(joint_one_based - 1)] == g;
}

std::vector<int> columns_of_group(const std::vector<std::string>& names, acquisition::JointGroup g) {
  std::vector<int> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (in_group(preprocessing::joint_of_column(names[i]), g)) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> all_columns(std::size_t n) {
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<int>(i);
  return out;
}

Eigen::MatrixXd subnet_inputs(const Subnet& s, const Eigen::MatrixXd& scaled_inputs,
                              const Eigen::MatrixXd& predictions) {
  Eigen::MatrixXd x(scaled_inputs.rows(), s.input_size());
  Eigen::Index c = 0;
  for (int f : s.feed_columns) x.col(c++) = predictions.col(f);
  for (int k : s.state_columns) x.col(c++) = scaled_inputs.col(k);
  return x;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& m, const std::vector<int>& cols) {
  return m(Eigen::all, cols);
}

}  // namespace

TorqueModel build(const ArchitectureSpec& spec) {
  spec.validate();
  TorqueModel model;
  model.spec = spec;
  model.input_names = preprocessing::input_names(spec.policy);
  model.target_names = preprocessing::target_names(spec.policy);
  model.input_scaler = preprocessing::identity_scaler(model.input_names);
  model.target_scaler = preprocessing::identity_scaler(model.target_names);

  if (spec.kind == ArchitectureKind::Single) {
    Subnet s;
    s.name = "single";
    s.state_columns = all_columns(model.input_names.size());
    s.output_columns = all_columns(model.target_names.size());
    model.subnets.push_back(std::move(s));
  } else {
    std::vector<int> upstream;
    for (int g = 0; g < acquisition::kNumGroups; ++g) {
      const auto group = static_cast<acquisition::JointGroup>(g);
      Subnet s;
      s.name = std::string(1, acquisition::group_name(group));
      s.state_columns = columns_of_group(model.input_names, group);
      s.output_columns = columns_of_group(model.target_names, group);
      if (spec.kind == ArchitectureKind::Cascade && g > 0) {
        s.feed_columns = spec.cumulative_feedthrough ? upstream : model.subnets.back().output_columns;
      }
      upstream.insert(upstream.end(), s.output_columns.begin(), s.output_columns.end());
      model.subnets.push_back(std::move(s));
    }
  }

  for (std::size_t i = 0; i < model.subnets.size(); ++i) {
    Subnet& s = model.subnets[i];
    nn::MlpConfig cfg;
    cfg.layer_sizes = {s.input_size(), spec.hidden[i], static_cast<int>(s.output_columns.size())};
    cfg.leaky_slope = spec.leaky_slope;
    cfg.seed = derive_seed(spec.seed, i);
    s.params = nn::initialize(cfg);
  }
  return model;
}

ArchitectureTraining train_architecture(TorqueModel model, const FeatureSet& train, const FeatureSet& test,
                                        const nn::OptimizerConfig& opt, const nn::TrainConfig& tc) {
  if (train.input_names != model.input_names || train.target_names != model.target_names ||
      test.input_names != model.input_names || test.target_names != model.target_names) {
    throw ValidationError("feature columns do not match the model's feature policy");
  }
  const auto& policy = model.spec.policy;
  model.input_scaler = policy.standardize_inputs ? preprocessing::fit_scaler(train.inputs, train.input_names)
                                                 : preprocessing::identity_scaler(train.input_names);
  model.target_scaler = policy.standardize_targets ? preprocessing::fit_scaler(train.targets, train.target_names)
                                                   : preprocessing::identity_scaler(train.target_names);

  const Eigen::MatrixXd train_x = preprocessing::transform(model.input_scaler, train.inputs);
  const Eigen::MatrixXd train_y = preprocessing::transform(model.target_scaler, train.targets);
  const Eigen::MatrixXd test_x = preprocessing::transform(model.input_scaler, test.inputs);
  const Eigen::MatrixXd test_y = preprocessing::transform(model.target_scaler, test.targets);

  ArchitectureTraining out;
  out.subnet_histories.resize(model.subnets.size());

  auto train_one = [&](std::size_t i, const Eigen::MatrixXd& train_pred, const Eigen::MatrixXd& test_pred) {
    Subnet& s = model.subnets[i];
    nn::TrainConfig sub_tc = tc;
    sub_tc.seed = derive_seed(tc.seed, i);
    nn::TrainResult r = nn::fit(s.params, subnet_inputs(s, train_x, train_pred), select_columns(train_y, s.output_columns),
                                subnet_inputs(s, test_x, test_pred), select_columns(test_y, s.output_columns), opt,
                                sub_tc);
    s.params = std::move(r.params);
    out.subnet_histories[i] = std::move(r.history);
  };

  Eigen::MatrixXd train_pred = Eigen::MatrixXd::Zero(train_y.rows(), train_y.cols());
  Eigen::MatrixXd test_pred = Eigen::MatrixXd::Zero(test_y.rows(), test_y.cols());

  if (model.spec.kind == ArchitectureKind::Multiple) {
    std::vector<std::future<void>> jobs;
    for (std::size_t i = 0; i < model.subnets.size(); ++i) {
      jobs.push_back(std::async(std::launch::async, [&, i] { train_one(i, train_pred, test_pred); }));
    }
    for (auto& j : jobs) j.get();
  } else {
    for (std::size_t i = 0; i < model.subnets.size(); ++i) {
      train_one(i, train_pred, test_pred);
      const Subnet& s = model.subnets[i];
      const Eigen::MatrixXd ptr = nn::forward_batch(s.params, subnet_inputs(s, train_x, train_pred));
      const Eigen::MatrixXd pte = nn::forward_batch(s.params, subnet_inputs(s, test_x, test_pred));
      for (std::size_t k = 0; k < s.output_columns.size(); ++k) {
        train_pred.col(s.output_columns[k]) = ptr.col(static_cast<Eigen::Index>(k));
        test_pred.col(s.output_columns[k]) = pte.col(static_cast<Eigen::Index>(k));
      }
    }
  }

  const std::size_t epochs = out.subnet_histories.front().epochs();
  const auto n_targets = static_cast<Eigen::Index>(model.target_names.size());
  for (std::size_t e = 0; e < epochs; ++e) {
    Eigen::VectorXd tr(n_targets), te(n_targets);
    double seconds = 0.0;
    for (std::size_t i = 0; i < model.subnets.size(); ++i) {
      const auto& h = out.subnet_histories[i];
      const auto& cols = model.subnets[i].output_columns;
      for (std::size_t k = 0; k < cols.size(); ++k) {
        tr(cols[k]) = h.train_mse_columns[e](static_cast<Eigen::Index>(k));
        te(cols[k]) = h.test_mse_columns[e](static_cast<Eigen::Index>(k));
      }
      seconds += h.epoch_seconds[e];
    }
    out.combined.train_mse.push_back(tr.mean());
    out.combined.test_mse.push_back(te.mean());
    out.combined.train_mse_columns.push_back(tr);
    out.combined.test_mse_columns.push_back(te);
    out.combined.epoch_seconds.push_back(seconds);
  }

  model.trained = true;
  out.model = std::move(model);
  return out;
}

Eigen::MatrixXd predict_scaled(const TorqueModel& model, const Eigen::MatrixXd& scaled_inputs) {
  if (scaled_inputs.cols() != static_cast<Eigen::Index>(model.input_names.size())) {
    throw ValidationError("prediction input has " + std::to_string(scaled_inputs.cols()) + " columns, model expects " +
                          std::to_string(model.input_names.size()));
  }
  Eigen::MatrixXd pred = Eigen::MatrixXd::Zero(scaled_inputs.rows(), static_cast<Eigen::Index>(model.target_names.size()));
  for (const Subnet& s : model.subnets) {
    const Eigen::MatrixXd y = nn::forward_batch(s.params, subnet_inputs(s, scaled_inputs, pred));
    for (std::size_t k = 0; k < s.output_columns.size(); ++k) pred.col(s.output_columns[k]) = y.col(static_cast<Eigen::Index>(k));
  }
  return pred;
}

Prediction predict(const TorqueModel& model, const Eigen::MatrixXd& raw_inputs) {
  if (!model.trained) throw ValidationError("model is untrained");
  Prediction p;
  p.scaled = predict_scaled(model, preprocessing::transform(model.input_scaler, raw_inputs));
  p.newton_meters = preprocessing::inverse_transform(model.target_scaler, p.scaled);
  return p;
}

Prediction predict(const TorqueModel& model, const Eigen::VectorXd& raw_row) {
  return predict(model, Eigen::MatrixXd(raw_row.transpose()));
}

}  // namespace torqueid::arch
