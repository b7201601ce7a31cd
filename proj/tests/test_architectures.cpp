#include <doctest.h>

#include <algorithm>
#include <random>

#include "torqueid/acquisition.hpp"
#include "torqueid/architectures.hpp"
#include "torqueid/errors.hpp"
#include "torqueid/model_io.hpp"

using namespace torqueid;
using namespace torqueid::arch;
using preprocessing::FeatureSet;
using preprocessing::joint_of_column;

namespace {

int group_of_joint(int joint) { return static_cast<int>(acquisition::kJointGroups[joint - 1]); }

struct Split {
  FeatureSet train, test;
};

Split small_split(const preprocessing::FeaturePolicy& policy) {
  auto spec = acquisition::default_sweep();
  spec.joints[0].step = 0.5;
  spec.joints[2].step = 0.5;
  const auto d = acquisition::shuffle(acquisition::generate_grid_sweep(default_robot(), spec, 3), 4);
  auto [tr, te] = acquisition::split(d, 0.7);
  return {preprocessing::select_features(tr, policy), preprocessing::select_features(te, policy)};
}

ArchitectureTraining quick_train(ArchitectureKind kind, std::vector<int> hidden, const Split& s, bool cumulative = false) {
  ArchitectureSpec spec;
  spec.kind = kind;
  spec.hidden = std::move(hidden);
  spec.cumulative_feedthrough = cumulative;
  spec.seed = 21;
  return train_architecture(build(spec), s.train, s.test, {nn::OptimizerKind::Adam, 3e-3}, {2, 64, true, 5});
}

// Columns of the output whose value moves when input column `c` of every
// row is shifted.
std::vector<bool> influenced(const TorqueModel& m, const Eigen::MatrixXd& x, Eigen::Index c) {
  const Eigen::MatrixXd base = predict(m, x).newton_meters;
  Eigen::MatrixXd moved = x;
  moved.col(c).array() += 0.37;
  const Eigen::MatrixXd after = predict(m, moved).newton_meters;
  std::vector<bool> out(static_cast<std::size_t>(base.cols()));
  for (Eigen::Index k = 0; k < base.cols(); ++k) out[static_cast<std::size_t>(k)] = (after.col(k) - base.col(k)).cwiseAbs().maxCoeff() != 0.0;
  return out;
}

}  // namespace

TEST_CASE("layer sizes") {
  ArchitectureSpec single;
  single.hidden = {30};
  const TorqueModel s = build(single);
  REQUIRE(s.subnets.size() == 1);
  CHECK(s.subnets[0].params.layer_sizes() == std::vector<int>{17, 30, 6});

  ArchitectureSpec multiple;
  multiple.kind = ArchitectureKind::Multiple;
  multiple.hidden = {5, 15, 30};
  const TorqueModel m = build(multiple);
  REQUIRE(m.subnets.size() == 3);
  CHECK(m.subnets[0].params.layer_sizes() == std::vector<int>{2, 5, 1});
  CHECK(m.subnets[1].params.layer_sizes() == std::vector<int>{6, 15, 2});
  CHECK(m.subnets[2].params.layer_sizes() == std::vector<int>{9, 30, 3});

  ArchitectureSpec cascade = multiple;
  cascade.kind = ArchitectureKind::Cascade;
  cascade.hidden = {26, 36, 48};
  const TorqueModel c = build(cascade);
  CHECK(c.subnets[0].params.layer_sizes() == std::vector<int>{2, 26, 1});
  CHECK(c.subnets[1].params.layer_sizes() == std::vector<int>{7, 36, 2});
  CHECK(c.subnets[2].params.layer_sizes() == std::vector<int>{11, 48, 3});

  cascade.cumulative_feedthrough = true;
  CHECK(build(cascade).subnets[2].params.layer_sizes() == std::vector<int>{12, 48, 3});

  ArchitectureSpec bad = multiple;
  bad.hidden = {5, 15};
  CHECK_THROWS_AS(build(bad), ValidationError);
}

TEST_CASE("subnets read only their own group's state") {
  for (const auto kind : {ArchitectureKind::Multiple, ArchitectureKind::Cascade}) {
    ArchitectureSpec spec;
    spec.kind = kind;
    spec.hidden = {5, 15, 30};
    const TorqueModel m = build(spec);
    for (std::size_t g = 0; g < m.subnets.size(); ++g) {
      for (int c : m.subnets[g].state_columns) CHECK(group_of_joint(joint_of_column(m.input_names[c])) == static_cast<int>(g));
      for (int c : m.subnets[g].output_columns) CHECK(group_of_joint(joint_of_column(m.target_names[c])) == static_cast<int>(g));
    }
    if (kind == ArchitectureKind::Multiple) {
      for (const auto& s : m.subnets) CHECK(s.feed_columns.empty());
    } else {
      CHECK(m.subnets[0].feed_columns.empty());
      CHECK(m.subnets[1].feed_columns == std::vector<int>{0});
      CHECK(m.subnets[2].feed_columns == std::vector<int>{1, 2});
    }
  }
}

TEST_CASE("untrained models refuse to predict") {
  const TorqueModel m = build(ArchitectureSpec{});
  CHECK_THROWS_AS(predict(m, Eigen::MatrixXd(Eigen::MatrixXd::Zero(2, 17))), ValidationError);
}

TEST_CASE("influence probes") {
  const Split s = small_split({});
  const Eigen::MatrixXd x = s.test.inputs.topRows(200);

  const auto multiple = quick_train(ArchitectureKind::Multiple, {5, 15, 30}, s).model;
  const auto cascade = quick_train(ArchitectureKind::Cascade, {6, 8, 10}, s).model;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const int g = group_of_joint(joint_of_column(multiple.input_names[static_cast<std::size_t>(c)]));
    const auto mi = influenced(multiple, x, c);
    const auto ci = influenced(cascade, x, c);
    for (std::size_t k = 0; k < mi.size(); ++k) {
      const int out_group = group_of_joint(static_cast<int>(k) + 1);
      if (out_group != g) CHECK_FALSE(mi[k]);
      if (out_group == g) CHECK(mi[k]);
      if (out_group < g) CHECK_FALSE(ci[k]);
      if (out_group == g) CHECK(ci[k]);
    }
  }
}

TEST_CASE("multiple outputs do not depend on evaluation order") {
  const Split s = small_split({});
  TorqueModel m = quick_train(ArchitectureKind::Multiple, {5, 15, 30}, s).model;
  const Eigen::MatrixXd before = predict(m, s.test.inputs).newton_meters;
  std::reverse(m.subnets.begin(), m.subnets.end());
  CHECK(predict(m, s.test.inputs).newton_meters == before);
}

TEST_CASE("single model delegates to the network") {
  const Split s = small_split({});
  const TorqueModel m = quick_train(ArchitectureKind::Single, {30}, s).model;
  const Eigen::VectorXd raw = s.test.inputs.row(7).transpose();
  const Eigen::VectorXd scaled = (raw - m.input_scaler.mean).cwiseQuotient(m.input_scaler.stddev);
  const Eigen::VectorXd net = nn::forward(m.subnets[0].params, scaled);
  CHECK((predict(m, raw).scaled.row(0).transpose() - net).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("combined multiple loss is the column-weighted mean of the subnet losses") {
  const Split s = small_split({});
  const auto t = quick_train(ArchitectureKind::Multiple, {5, 15, 30}, s);
  REQUIRE(t.subnet_histories.size() == 3);
  for (std::size_t e = 0; e < t.combined.epochs(); ++e) {
    const double weighted = (1.0 * t.subnet_histories[0].test_mse[e] + 2.0 * t.subnet_histories[1].test_mse[e] +
                             3.0 * t.subnet_histories[2].test_mse[e]) / 6.0;
    CHECK(t.combined.test_mse[e] == doctest::Approx(weighted).epsilon(1e-13));
  }
}

TEST_CASE("cascade net b receives net a's predictions") {
  const Split s = small_split({});
  const TorqueModel m = quick_train(ArchitectureKind::Cascade, {6, 8, 10}, s).model;
  const Eigen::MatrixXd xs = preprocessing::transform(m.input_scaler, s.test.inputs.topRows(20));
  const Eigen::MatrixXd all = predict_scaled(m, xs);

  const auto& a = m.subnets[0];
  const auto& b = m.subnets[1];
  Eigen::MatrixXd in_a(xs.rows(), a.input_size());
  for (std::size_t i = 0; i < a.state_columns.size(); ++i) in_a.col(static_cast<Eigen::Index>(i)) = xs.col(a.state_columns[i]);
  const Eigen::MatrixXd tau1 = nn::forward_batch(a.params, in_a);
  Eigen::MatrixXd in_b(xs.rows(), b.input_size());
  in_b.col(0) = tau1.col(0);
  for (std::size_t i = 0; i < b.state_columns.size(); ++i) in_b.col(static_cast<Eigen::Index>(i + 1)) = xs.col(b.state_columns[i]);
  const Eigen::MatrixXd tau23 = nn::forward_batch(b.params, in_b);
  CHECK((all.col(0) - tau1.col(0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((all.middleCols(1, 2) - tau23).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("model artifact round trip") {
  const Split s = small_split({true, true, true, true});
  for (const auto kind : {ArchitectureKind::Single, ArchitectureKind::Multiple, ArchitectureKind::Cascade}) {
    ArchitectureSpec spec;
    spec.kind = kind;
    spec.hidden = kind == ArchitectureKind::Single ? std::vector<int>{12} : std::vector<int>{4, 6, 8};
    spec.policy = {true, true, true, true};
    const auto t = train_architecture(build(spec), s.train, s.test, {}, {1, 64, true, 1});
    const Json j = model_to_json(t.model, Json{{"seed", 1}});
    const TorqueModel back = model_from_json(Json::parse(j.dump()));
    CHECK(model_to_json(back, Json{{"seed", 1}}).dump() == j.dump());
    CHECK(predict(back, s.test.inputs).newton_meters == predict(t.model, s.test.inputs).newton_meters);
    CHECK(back.input_names.size() == 14);
    CHECK(back.target_names.size() == 5);
  }
  Json broken = model_to_json(quick_train(ArchitectureKind::Single, {4}, small_split({})).model);
  broken["subnets"][0]["network"]["layers"][0]["weights"].erase(0);
  CHECK_THROWS_AS(model_from_json(broken), ValidationError);
}

TEST_CASE("architecture training is reproducible") {
  const Split s = small_split({});
  for (const auto kind : {ArchitectureKind::Single, ArchitectureKind::Multiple, ArchitectureKind::Cascade}) {
    const std::vector<int> hidden = kind == ArchitectureKind::Single ? std::vector<int>{10} : std::vector<int>{4, 6, 8};
    const auto a = quick_train(kind, hidden, s);
    const auto b = quick_train(kind, hidden, s);
    CHECK(a.combined.test_mse == b.combined.test_mse);
    CHECK(model_to_json(a.model).dump() == model_to_json(b.model).dump());
  }
}
