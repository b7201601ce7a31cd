#include <doctest.h>

#include <charconv>
#include <numeric>
#include <sstream>

#include "test_support.hpp"
#include "torqueid/digest.hpp"
#include "torqueid/errors.hpp"
#include "torqueid/experiment.hpp"
#include "torqueid/keyvalue.hpp"

using namespace torqueid;
using namespace torqueid::experiment;

namespace {

struct Fixture {
  fs::path dir = support::scratch("experiment");
  fs::path sweep = dir / "sweep.txt";
  fs::path data = dir / "data.csv";
  Fixture() {
    write_text_file(sweep, acquisition::format_sweep(support::small_sweep()));
    std::ostringstream log;
    gen_data({std::nullopt, sweep, data, 5, true}, log);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

RunConfig quick(arch::ArchitectureKind kind, bool scale = true) {
  RunConfig c;
  c.architecture = kind;
  c.scale = scale;
  c.epochs = 3;
  c.seed = 4;
  return c;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream s(line);
  std::string cell;
  while (std::getline(s, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse(const std::string& s) {
  double v = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

}  // namespace

TEST_CASE("gen-data writes a reproducible CSV") {
  const auto& f = fixture();
  std::ostringstream log;
  const fs::path again = f.dir / "again.csv";
  const auto r = gen_data({std::nullopt, f.sweep, again, 5, true}, log);
  CHECK(sha256_file(again) == sha256_file(f.data));
  CHECK(r.csv_sha256 == sha256_file(f.data));
  CHECK(log.str().find("rows: " + std::to_string(r.rows)) != std::string::npos);
  CHECK(log.str().find("duration_s: ") != std::string::npos);
  CHECK(log.str().find("seed=5") != std::string::npos);
  const std::string text = support::slurp(f.data);
  CHECK(text.substr(0, text.find('\n')) == dataset_csv_header());
  CHECK(support::csv_rows(text) == r.rows);

  const auto other = gen_data({std::nullopt, f.sweep, f.dir / "other.csv", 6, true}, log);
  CHECK(other.csv_sha256 != r.csv_sha256);
}

TEST_CASE("train defaults and metrics document") {
  const auto& f = fixture();
  RunConfig defaults;
  CHECK(defaults.resolved_hidden() == std::vector<int>{30});
  CHECK(defaults.optimizer == nn::OptimizerKind::Adam);
  CHECK(defaults.learning_rate == 1e-3);
  CHECK(defaults.epochs == 10);
  CHECK(defaults.batch_size == 64);
  CHECK(defaults.train_fraction == 0.7);

  TrainOptions opt;
  opt.data = f.data;
  opt.run = defaults;
  opt.metrics_out = f.dir / "metrics.json";
  opt.model_out = f.dir / "model.json";
  opt.predictions_out = f.dir / "pred.csv";
  opt.prediction_rows = 120;
  std::ostringstream log;
  const Json m = cmd_train(opt, log);
  CHECK(read_json_file(*opt.metrics_out) == m);

  CHECK(m["hyperparameters"]["hidden"] == Json::array({30}));
  CHECK(m["hyperparameters"]["optimizer"] == "adam");
  CHECK(m["hyperparameters"]["learning_rate"] == 1e-3);
  CHECK(m["hyperparameters"]["epochs"] == 10);
  CHECK(m["scaled"] == true);
  CHECK(m["features"]["input_dimension"] == 17);
  CHECK(m["curves"]["test_mse"].size() == 10);
  CHECK(m["curves"]["train_mse"].size() == 10);
  CHECK(m["curves"]["epoch"].size() == 10);
  CHECK(m["per_joint"].size() == 6);

  const auto curve = m["curves"]["test_mse"].get<std::vector<double>>();
  CHECK(m["avg_test_mse"].get<double>() == std::accumulate(curve.begin(), curve.end(), 0.0) / 10.0);

  const auto rows = m["provenance"]["train_rows"].get<std::size_t>() + m["provenance"]["test_rows"].get<std::size_t>();
  CHECK(m["provenance"]["train_rows"].get<std::size_t>() == rows * 7 / 10);
  CHECK(m["provenance"]["data_sha256"] == sha256_file(f.data));

  const std::string pred = support::slurp(*opt.predictions_out);
  CHECK(pred.rfind("index,tau1_actual,tau1_predicted,", 0) == 0);
  CHECK(support::csv_rows(pred) == 120);

  const Json model = read_json_file(*opt.model_out);
  CHECK(model["schema"] == "torqueid.model/1");
  CHECK(log.str().find("provenance: command=train seed=0 data_sha256=" + sha256_file(f.data)) != std::string::npos);
}

TEST_CASE("unscaled runs are flagged and reported in standardized units") {
  const auto& f = fixture();
  acquisition::Dataset data = read_dataset_csv(f.data);
  const auto scaled = run_training(data, "x", quick(arch::ArchitectureKind::Single, true));
  const auto raw = run_training(data, "x", quick(arch::ArchitectureKind::Single, false));
  CHECK(raw.metrics["scaled"] == false);
  CHECK_FALSE(raw.training.model.spec.policy.standardize_inputs);
  CHECK(raw.training.model.input_scaler.mean.cwiseAbs().maxCoeff() == 0.0);

  // Standardized units: per-joint MSE in N*m divided by the train-split variance.
  auto [train, test] = acquisition::split(data, 0.7);
  const auto fs = preprocessing::select_features(train, {});
  const auto stats = preprocessing::fit_scaler(fs.targets);
  for (const auto* r : {&scaled, &raw}) {
    for (std::size_t j = 0; j < 6; ++j) {
      const double nm = r->metrics["per_joint"][j]["mse_nm"].get<double>();
      const double sd = stats.stddev(static_cast<Eigen::Index>(j));
      CHECK(r->metrics["per_joint"][j]["mse_standardized"].get<double>() == doctest::Approx(nm / (sd * sd)).epsilon(1e-9));
    }
  }
}

TEST_CASE("hpo study file") {
  const auto& f = fixture();
  HpoOptions opt;
  opt.data = f.data;
  opt.base = quick(arch::ArchitectureKind::Cascade);
  opt.trials = 4;
  opt.study_seed = 8;
  opt.out = f.dir / "study.json";
  std::ostringstream log;
  const Json s = cmd_hpo(opt, log);
  CHECK(s["trials"].size() == 4);
  const auto best = s["best_index"].get<std::size_t>();
  for (const auto& t : s["trials"]) {
    if (t["status"] == "complete") CHECK(s["trials"][best]["objective"].get<double>() <= t["objective"].get<double>());
  }
  CHECK(s["experiment"]["architecture"] == "cascade");
  CHECK(s["trials"][best]["metrics"].contains("full_test_mse"));

  std::ostringstream again;
  const Json s2 = cmd_hpo(opt, again);
  CHECK(format_best_assignment(s2) == format_best_assignment(s));
  CHECK(s2.dump() == s.dump());
  CHECK(log.str().find("best: " + format_best_assignment(s)) != std::string::npos);
  CHECK(format_best_assignment(s).rfind("cascade | ", 0) == 0);
}

TEST_CASE("report rows mirror their sources") {
  const auto& f = fixture();
  std::vector<fs::path> inputs;
  std::vector<Json> docs;
  for (const auto kind : {arch::ArchitectureKind::Single, arch::ArchitectureKind::Multiple, arch::ArchitectureKind::Cascade}) {
    for (bool scale : {true, false}) {
      TrainOptions opt;
      opt.data = f.data;
      opt.run = quick(kind, scale);
      opt.metrics_out = f.dir / ("m_" + arch::to_string(kind) + (scale ? "_s" : "_u") + ".json");
      std::ostringstream log;
      docs.push_back(cmd_train(opt, log));
      inputs.push_back(*opt.metrics_out);
    }
  }
  for (const auto kind : {arch::ArchitectureKind::Single, arch::ArchitectureKind::Multiple, arch::ArchitectureKind::Cascade}) {
    HpoOptions opt;
    opt.data = f.data;
    opt.base = quick(kind);
    opt.base.epochs = 2;
    opt.trials = 2;
    opt.out = f.dir / ("s_" + arch::to_string(kind) + ".json");
    std::ostringstream log;
    docs.push_back(cmd_hpo(opt, log));
    inputs.push_back(*opt.out);
  }

  std::ostringstream log;
  const fs::path out = f.dir / "report.csv";
  const std::string csv = cmd_report(inputs, out, log);
  CHECK(support::slurp(out) == csv);
  std::stringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line.rfind("arch,scaling,avg_test_mse,full_test_mse,hidden,optimizer,lr", 0) == 0);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(lines, line)) rows.push_back(split_csv_line(line));
  REQUIRE(rows.size() == 9);

  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(rows[i][0] == docs[i]["architecture"]);
    CHECK(rows[i][1] == (docs[i]["scaled"].get<bool>() ? "with" : "without"));
    CHECK(parse(rows[i][2]) == docs[i]["avg_test_mse"].get<double>());
    CHECK(parse(rows[i][3]) == docs[i]["full_test_mse"].get<double>());
    CHECK(rows[i][5] == "adam");
    CHECK(parse(rows[i][6]) == 1e-3);
    CHECK(rows[i][8].empty());
  }
  CHECK(rows[2][4] == "5;15;30");
  for (std::size_t i = 6; i < 9; ++i) {
    const Json& s = docs[i];
    const Json& t = s["trials"][s["best_index"].get<std::size_t>()];
    CHECK(parse(rows[i][2]) == t["metrics"]["avg_test_mse"].get<double>());
    CHECK(parse(rows[i][3]) == t["metrics"]["full_test_mse"].get<double>());
    CHECK(parse(rows[i][6]) == t["params"]["learning_rate"].get<double>());
    CHECK(rows[i][7] == "optimized");
    const double baseline = docs[(i - 6) * 2]["full_test_mse"].get<double>();
    CHECK(parse(rows[i][8]) == t["metrics"]["full_test_mse"].get<double>() - baseline);
  }

  CHECK_THROWS_AS(cmd_report({f.dir / "missing.json"}, std::nullopt, log), ValidationError);
  write_text_file(f.dir / "other.json", "{\"schema\": \"something/1\"}");
  CHECK_THROWS_AS(cmd_report({f.dir / "other.json"}, std::nullopt, log), ValidationError);
}

TEST_CASE("plots and sidecars") {
  const auto& f = fixture();
  TrainOptions opt;
  opt.data = f.data;
  opt.run = quick(arch::ArchitectureKind::Single);
  opt.metrics_out = f.dir / "plot_metrics.json";
  opt.predictions_out = f.dir / "plot_pred.csv";
  opt.prediction_rows = 80;
  std::ostringstream log;
  cmd_train(opt, log);

  const auto loss = cmd_plot(*opt.metrics_out, f.dir / "loss.svg", log);
  const std::string svg = support::slurp(f.dir / "loss.svg");
  std::size_t polylines = 0;
  for (std::size_t p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++polylines;
  CHECK(polylines == 2);
  CHECK(svg.find(">epoch<") != std::string::npos);
  CHECK(svg.find(">MSE<") != std::string::npos);
  CHECK(loss.panels == 1);
  CHECK(support::csv_rows(support::slurp(loss.sidecar)) == 3);

  const auto pred = cmd_plot(*opt.predictions_out, f.dir / "pred.svg", log);
  CHECK(pred.panels == 6);
  CHECK(pred.rows == 80);
  CHECK(support::csv_rows(support::slurp(pred.sidecar)) == 80);

  write_text_file(f.dir / "bad.csv", "index,tau1_actual,tau1_predicted\n0,1,x\n");
  CHECK_THROWS_AS(cmd_plot(f.dir / "bad.csv", f.dir / "bad.svg", log), ValidationError);
  write_text_file(f.dir / "bad.json", "{\"curves\": {\"epoch\": [1], \"train_mse\": [1, 2], \"test_mse\": [1]}}");
  CHECK_THROWS_AS(cmd_plot(f.dir / "bad.json", f.dir / "bad.svg", log), ValidationError);
  write_text_file(f.dir / "broken.json", "{not json");
  CHECK_THROWS_AS(cmd_plot(f.dir / "broken.json", f.dir / "bad.svg", log), ValidationError);
}

TEST_CASE("saved models predict like the trained ones") {
  const auto& f = fixture();
  TrainOptions opt;
  opt.data = f.data;
  opt.run = quick(arch::ArchitectureKind::Multiple);
  opt.model_out = f.dir / "pm.json";
  std::ostringstream log;
  cmd_train(opt, log);
  const auto rows = cmd_predict(*opt.model_out, f.data, f.dir / "pm.csv", log);
  CHECK(support::csv_rows(support::slurp(f.dir / "pm.csv")) == rows);
}

TEST_CASE("exit codes follow the exception type") {
  auto code = [](auto thrower) {
    std::ostringstream err;
    try {
      thrower();
    } catch (...) {
      return exit_code_for_current_exception(err);
    }
    return -1;
  };
  CHECK(code([] { throw ValidationError("v"); }) == 2);
  CHECK(code([] { throw IoError("i"); }) == 1);
  CHECK(code([] { throw NumericalError("n"); }) == 3);
  CHECK(code([] { throw TrainingDiverged(4); }) == 3);
}
