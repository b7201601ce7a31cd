// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "oracles/finite_difference.hpp"
#include "oracles/lagrangian.hpp"
#include "oracles/planar.hpp"
#include "test_support.hpp"
#include "torqueid/architectures.hpp"
#include "torqueid/digest.hpp"
#include "torqueid/dynamics.hpp"
#include "torqueid/experiment.hpp"
#include "torqueid/keyvalue.hpp"
#include "torqueid/preprocessing.hpp"
#include "torqueid/tpe.hpp"

using namespace torqueid;
namespace ex = torqueid::experiment;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4e", v);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = secs < limit_seconds;
  const bool pass = o.pass && in_time;
  failures += pass ? 0 : 1;
  char timing[64];
  std::snprintf(timing, sizeof(timing), "%.1f s of %.0f s", secs, limit_seconds);
  std::cout << (pass ? "PASS" : "FAIL") << "  " << id << " " << name << ": " << o.detail << " [" << timing
            << (in_time ? "" : ", too slow") << "]" << std::endl;
}

Vector6 random_q(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector6 v;
  for (int i = 0; i < kNumJoints; ++i) v(i) = u(rng);
  return v;
}

// Fixed synthetic dataset shared by the pipeline criteria.
const fs::path& pinned_data() {
  static const fs::path dir = support::scratch("acceptance");
  static const fs::path data = [] {
    std::ostringstream log;
    ex::gen_data({std::nullopt, std::nullopt, dir / "data.csv", 2024, true}, log);
    return dir / "data.csv";
  }();
  return data;
}

const acquisition::Dataset& pinned_dataset() {
  static const acquisition::Dataset d = read_dataset_csv(pinned_data());
  return d;
}

const std::string& pinned_sha() {
  static const std::string s = sha256_file(pinned_data());
  return s;
}

ex::RunConfig baseline(arch::ArchitectureKind kind) {
  ex::RunConfig c;
  c.architecture = kind;
  c.seed = 7;
  return c;
}

Outcome gradient_oracle() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int in = 1 + static_cast<int>(rng() % 5), hid = 1 + static_cast<int>(rng() % 6), out = 1 + static_cast<int>(rng() % 3);
    nn::MlpParams p = nn::initialize({{in, hid, out}, nn::kDefaultLeakySlope, rng()});
    for (auto& l : p.layers)
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = 0.5 * n(rng);
    const int rows = 2 + static_cast<int>(rng() % 10);
    Eigen::MatrixXd x(rows, in), y(rows, out);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = n(rng);
    worst = std::max(worst, oracle::check_gradients(p, x, y).max_relative);
  }
  return {worst < 1e-6, "20 nets, max relative deviation " + sci(worst) + " (limit 1e-6)"};
}

Outcome dynamics_oracle() {
  const RobotModel m = default_robot();
  std::mt19937_64 rng(99);
  double asym = 0.0;
  int chol_fail = 0;
  for (int k = 0; k < 100; ++k) {
    const Matrix6 B = dynamics::mass_matrix(m, random_q(rng, M_PI));
    asym = std::max(asym, (B - B.transpose()).cwiseAbs().maxCoeff());
    chol_fail += Eigen::LLT<Matrix6>(B).info() == Eigen::Success ? 0 : 1;
  }
  const oracle::Planar p;
  const RobotModel planar = oracle::planar_arm(p);
  double planar_err = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector6 q = random_q(rng, M_PI), qd = random_q(rng, 3.0), qdd = random_q(rng, 5.0);
    const Vector6 tau = dynamics::inverse_dynamics(planar, {q, qd, qdd}, dynamics::Friction::Off).tau;
    const Eigen::Vector2d ref = oracle::planar_closed_form(p, q.head<2>(), qd.head<2>(), qdd.head<2>());
    planar_err = std::max(planar_err, (tau.head<2>() - ref).cwiseAbs().maxCoeff());
  }
  const double energy = oracle::energy_balance_error(m, oracle::energy_start(), oracle::energy_end(), 2.0);
  const bool pass = asym < 1e-9 && chol_fail == 0 && planar_err < 1e-8 && energy < 1e-3;
  return {pass, "asymmetry " + sci(asym) + ", cholesky failures " + std::to_string(chol_fail) + "/100, planar error " +
                    sci(planar_err) + ", energy balance " + sci(energy)};
}

Outcome standardization() {
  auto [train, test] = acquisition::split(pinned_dataset(), 0.7);
  double mean_err = 0.0, sd_err = 0.0, round_trip = 0.0;
  for (const preprocessing::FeaturePolicy policy :
       {preprocessing::FeaturePolicy{}, preprocessing::FeaturePolicy{true, true, true, true}}) {
    const auto fs = preprocessing::select_features(train, policy);
    for (const Eigen::MatrixXd* x : {&fs.inputs, &fs.targets}) {
      const auto stats = preprocessing::fit_scaler(*x);
      const Eigen::MatrixXd z = preprocessing::transform(stats, *x);
      for (Eigen::Index c = 0; c < z.cols(); ++c) {
        const double mean = z.col(c).mean();
        const double sd = std::sqrt((z.col(c).array() - mean).square().mean());
        mean_err = std::max(mean_err, std::abs(mean));
        sd_err = std::max(sd_err, std::abs(sd - 1.0));
      }
      round_trip = std::max(round_trip, (preprocessing::inverse_transform(stats, z) - *x).cwiseAbs().maxCoeff());
    }
  }
  return {mean_err < 1e-9 && sd_err < 1e-9 && round_trip < 1e-12,
          "max |mean| " + sci(mean_err) + ", max |std-1| " + sci(sd_err) + ", round trip " + sci(round_trip)};
}

Outcome pipeline_direction() {
  ex::RunConfig scaled = baseline(arch::ArchitectureKind::Single);
  ex::RunConfig raw = scaled;
  raw.scale = false;
  const double s = ex::run_training(pinned_dataset(), pinned_sha(), scaled).metrics["avg_test_mse"].get<double>();
  const double u = ex::run_training(pinned_dataset(), pinned_sha(), raw).metrics["avg_test_mse"].get<double>();
  return {s <= u, std::to_string(pinned_dataset().size()) + " rows, single NN average test MSE scaled " + sci(s) +
                      " <= unscaled " + sci(u)};
}

Outcome hpo_improvement() {
  const ex::RunConfig base = baseline(arch::ArchitectureKind::Cascade);
  const double b = ex::run_training(pinned_dataset(), pinned_sha(), base).metrics["full_test_mse"].get<double>();
  ex::HpoOptions opt;
  opt.data = pinned_data();
  opt.base = base;
  opt.trials = 10;
  opt.study_seed = 7;
  std::ostringstream log;
  const Json study = ex::cmd_hpo(opt, log);
  const Json& best = study["trials"][study["best_index"].get<std::size_t>()];
  const double o = best["metrics"]["full_test_mse"].get<double>();
  return {o <= b, "cascade full test MSE optimized " + sci(o) + " <= baseline " + sci(b) + " (" +
                      ex::format_best_assignment(study) + ")"};
}

Outcome tpe_non_inferiority() {
  const hpo::SearchSpace space{{hpo::FloatDimension{"x", 0.0, 1.0, false}}};
  auto f = [](const hpo::Assignment& a, std::uint64_t) { return hpo::ObjectiveResult{std::pow(a.real(0) - 0.3, 2), {}}; };
  hpo::TpeSettings random_search;
  random_search.random_only = true;
  std::vector<double> tpe, rnd;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = hpo::run_study(f, space, 30, seed);
    const auto b = hpo::run_study(f, space, 30, seed, random_search);
    tpe.push_back(a.trials[*a.best_index].objective);
    rnd.push_back(b.trials[*b.best_index].objective);
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  };
  const double mt = median(tpe), mr = median(rnd);
  return {mt <= mr, "median best over 20 seeds TPE " + sci(mt) + " <= random " + sci(mr)};
}

Outcome architecture_structure() {
  const auto run_m = ex::run_training(pinned_dataset(), pinned_sha(), baseline(arch::ArchitectureKind::Multiple));
  const auto run_c = ex::run_training(pinned_dataset(), pinned_sha(), baseline(arch::ArchitectureKind::Cascade));
  const auto& mm = run_m.training.model;
  const auto& cm = run_c.training.model;
  auto [train, test] = acquisition::split(pinned_dataset(), 0.7);
  const Eigen::MatrixXd x = preprocessing::select_features(test, {}).inputs.topRows(500);

  double multiple_cross = 0.0, cascade_upstream = 0.0;
  int multiple_own = 0, probes = 0;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const int g = static_cast<int>(acquisition::kJointGroups[preprocessing::joint_of_column(mm.input_names[c]) - 1]);
    Eigen::MatrixXd moved = x;
    moved.col(c).array() += 0.5;
    const Eigen::MatrixXd dm = arch::predict(mm, moved).newton_meters - arch::predict(mm, x).newton_meters;
    const Eigen::MatrixXd dc = arch::predict(cm, moved).newton_meters - arch::predict(cm, x).newton_meters;
    for (int k = 0; k < kNumJoints; ++k) {
      const int og = static_cast<int>(acquisition::kJointGroups[k]);
      const double m_dev = dm.col(k).cwiseAbs().maxCoeff();
      if (og != g) multiple_cross = std::max(multiple_cross, m_dev);
      if (og == g) multiple_own += m_dev > 0.0 ? 1 : 0;
      if (og < g) cascade_upstream = std::max(cascade_upstream, dc.col(k).cwiseAbs().maxCoeff());
      ++probes;
    }
  }
  const bool pass = multiple_cross == 0.0 && cascade_upstream == 0.0 && multiple_own > 0;
  return {pass, std::to_string(probes) + " probes, multiple off-block deviation " + sci(multiple_cross) +
                    ", cascade upstream deviation " + sci(cascade_upstream)};
}

Outcome joint6_removal() {
  ex::RunConfig full = baseline(arch::ArchitectureKind::Single);
  ex::RunConfig reduced = full;
  reduced.drop_joint6 = true;
  const Json a = ex::run_training(pinned_dataset(), pinned_sha(), full).metrics;
  const Json b = ex::run_training(pinned_dataset(), pinned_sha(), reduced).metrics;
  double retained = 0.0;
  for (int j = 0; j < 5; ++j) retained += a["per_joint"][j]["mse_standardized"].get<double>() / 5.0;
  const double without = b["full_test_mse"].get<double>();
  return {without <= retained, "joints 1-5 full test MSE with 14 inputs " + sci(without) + " <= with 17 inputs " +
                                   sci(retained) + " (joint 6 noise x" +
                                   format_double(acquisition::default_sweep().joint6_noise_factor) + ")"};
}

// Runs every command into `dir` and returns the digest of each artifact.
std::vector<std::pair<std::string, std::string>> command_artifacts(const fs::path& dir) {
  fs::create_directories(dir);
  std::ostringstream log;
  ex::gen_data({std::nullopt, std::nullopt, dir / "data.csv", 31, true}, log);
  std::vector<fs::path> metrics;
  for (const auto kind : {arch::ArchitectureKind::Single, arch::ArchitectureKind::Multiple, arch::ArchitectureKind::Cascade}) {
    ex::TrainOptions t;
    t.data = dir / "data.csv";
    t.run = baseline(kind);
    t.model_out = dir / ("model_" + arch::to_string(kind) + ".json");
    t.metrics_out = dir / ("metrics_" + arch::to_string(kind) + ".json");
    t.predictions_out = dir / ("pred_" + arch::to_string(kind) + ".csv");
    ex::cmd_train(t, log);
    metrics.push_back(*t.metrics_out);
  }
  ex::HpoOptions h;
  h.data = dir / "data.csv";
  h.base = baseline(arch::ArchitectureKind::Cascade);
  h.base.epochs = 3;
  h.trials = 5;
  h.out = dir / "study.json";
  ex::cmd_hpo(h, log);
  metrics.push_back(*h.out);
  ex::cmd_report(metrics, dir / "report.csv", log);
  ex::cmd_plot(dir / "metrics_single.json", dir / "loss.svg", log);
  ex::cmd_plot(dir / "pred_single.csv", dir / "pred.svg", log);
  ex::cmd_predict(dir / "model_cascade.json", dir / "data.csv", dir / "applied.csv", log);

  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : fs::directory_iterator(dir)) out.emplace_back(e.path().filename().string(), sha256_file(e.path()));
  std::sort(out.begin(), out.end());
  return out;
}

Outcome determinism() {
  const fs::path root = support::scratch("determinism");
  const auto a = command_artifacts(root / "a");
  const auto b = command_artifacts(root / "b");
  std::size_t same = 0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) same += a[i] == b[i] ? 1 : 0;
  return {a.size() == b.size() && same == a.size() && a.size() >= 15,
          std::to_string(same) + "/" + std::to_string(a.size()) + " artifacts byte-identical across re-runs"};
}

}  // namespace

int main() {
  criterion(1, "gradient oracle", 10, gradient_oracle);
  criterion(2, "dynamics oracle", 30, dynamics_oracle);
  criterion(3, "standardization", 60, standardization);
  criterion(4, "pipeline direction (scaling)", 300, pipeline_direction);
  criterion(5, "hpo improvement (cascade)", 1800, hpo_improvement);
  criterion(6, "tpe non-inferiority", 10, tpe_non_inferiority);
  criterion(7, "architecture structure", 300, architecture_structure);
  criterion(8, "joint-6 removal direction", 300, joint6_removal);
  criterion(9, "determinism", 600, determinism);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
