#include "torqueid/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <sstream>

#include "torqueid/dataset_io.hpp"
#include "torqueid/digest.hpp"
#include "torqueid/errors.hpp"
#include "torqueid/keyvalue.hpp"
#include "torqueid/seeding.hpp"
#include "torqueid/svg_plot.hpp"

namespace torqueid::experiment {

using arch::ArchitectureKind;

int exit_code_for_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const TrainingDiverged& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed document: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  }
}

// ---------------------------------------------------------------- gen-data

GenDataResult gen_data(const GenDataOptions& options, std::ostream& log) {
  const RobotModel robot = options.robot_path ? load_robot(*options.robot_path) : default_robot();
  const acquisition::SweepSpec sweep =
      options.sweep_path ? acquisition::load_sweep(*options.sweep_path) : acquisition::default_sweep();

  acquisition::Dataset data = acquisition::generate_grid_sweep(robot, sweep, options.seed);
  GenDataResult result;
  result.rows = data.size();
  result.duration_seconds = static_cast<double>(data.size()) * sweep.sample_period;
  if (options.shuffle) data = acquisition::shuffle(std::move(data), derive_seed(options.seed, 1));

  const std::string csv = format_dataset_csv(data);
  write_text_file(options.out, csv);
  result.csv_sha256 = sha256_hex(csv);

  log << "rows: " << result.rows << '\n';
  log << "duration_s: " << format_double(result.duration_seconds) << '\n';
  log << "provenance: command=gen-data seed=" << options.seed << " robot_sha256=" << data.provenance.robot_digest
      << " sweep_sha256=" << data.provenance.sweep_digest << " csv_sha256=" << result.csv_sha256 << '\n';
  return result;
}

// ------------------------------------------------------------------- train

std::vector<int> RunConfig::resolved_hidden() const {
  if (!hidden.empty()) return hidden;
  switch (architecture) {
    case ArchitectureKind::Single: return {30};
    case ArchitectureKind::Multiple: return {5, 15, 30};
    case ArchitectureKind::Cascade: return {30, 30, 30};
  }
  return {30};
}

namespace {


Json curve_json(const std::vector<double>& v) { return Json(v); }

}  // namespace

RunOutcome run_training(const acquisition::Dataset& data, const std::string& data_sha256, const RunConfig& config) {
  auto [train_ds, test_ds] = acquisition::split(data, config.train_fraction);
  if (train_ds.size() < 2 || test_ds.empty()) {
    throw ValidationError("dataset too small to split: " + std::to_string(data.size()) + " rows");
  }

  preprocessing::FeaturePolicy policy;
  policy.drop_q1 = config.drop_q1;
  policy.drop_joint6 = config.drop_joint6;
  policy.standardize_inputs = config.scale;
  policy.standardize_targets = config.scale;
  const auto train_fs = preprocessing::select_features(train_ds, policy);
  const auto test_fs = preprocessing::select_features(test_ds, policy);

  arch::ArchitectureSpec spec;
  spec.kind = config.architecture;
  spec.hidden = config.resolved_hidden();
  spec.policy = policy;
  spec.cumulative_feedthrough = config.cumulative_feedthrough;
  spec.seed = derive_seed(config.seed, 0);

  nn::OptimizerConfig opt;
  opt.kind = config.optimizer;
  opt.learning_rate = config.learning_rate;
  nn::TrainConfig tc;
  tc.epochs = config.epochs;
  tc.batch_size = config.batch_size;
  tc.seed = derive_seed(config.seed, 1);

  RunOutcome out;
  out.training = arch::train_architecture(arch::build(spec), train_fs, test_fs, opt, tc);
  const arch::TorqueModel& model = out.training.model;

  // Reporting units: targets standardized with train-split statistics.
  const auto report = preprocessing::fit_scaler(train_fs.targets, train_fs.target_names);
  Eigen::VectorXd to_report = Eigen::VectorXd::Ones(report.size());
  if (!policy.standardize_targets) to_report = report.stddev.array().square().inverse().matrix();

  std::vector<double> train_curve, test_curve;
  const auto& combined = out.training.combined;
  for (std::size_t e = 0; e < combined.epochs(); ++e) {
    train_curve.push_back(combined.train_mse_columns[e].cwiseProduct(to_report).mean());
    test_curve.push_back(combined.test_mse_columns[e].cwiseProduct(to_report).mean());
  }
  double avg = 0.0;
  for (double v : test_curve) avg += v;
  avg /= static_cast<double>(test_curve.size());

  const arch::Prediction pred = arch::predict(model, test_fs.inputs);
  const auto eval_std = nn::mse(preprocessing::transform(report, pred.newton_meters),
                                preprocessing::transform(report, test_fs.targets));
  const auto eval_nm = nn::mse(pred.newton_meters, test_fs.targets);
  out.test_actual_nm = test_fs.targets;
  out.test_predicted_nm = pred.newton_meters;

  Json per_joint = Json::array();
  for (std::size_t c = 0; c < test_fs.target_names.size(); ++c) {
    const auto i = static_cast<Eigen::Index>(c);
    per_joint.push_back(Json{{"name", test_fs.target_names[c]},
                             {"mse_standardized", eval_std.per_column(i)},
                             {"mse_nm", eval_nm.per_column(i)}});
  }

  Json subnets = Json::array();
  for (std::size_t i = 0; i < model.subnets.size(); ++i) {
    const auto& h = out.training.subnet_histories[i];
    subnets.push_back(Json{{"name", model.subnets[i].name},
                           {"layer_sizes", model.subnets[i].params.layer_sizes()},
                           {"train_mse", curve_json(h.train_mse)},
                           {"test_mse", curve_json(h.test_mse)}});
  }

  std::vector<int> epochs(test_curve.size());
  for (std::size_t e = 0; e < epochs.size(); ++e) epochs[e] = static_cast<int>(e + 1);

  out.metrics = Json{
      {"schema", "torqueid.metrics/1"},
      {"architecture", arch::to_string(config.architecture)},
      {"scaled", config.scale},
      {"source", "baseline"},
      {"hyperparameters", {{"hidden", spec.hidden},
                           {"optimizer", nn::to_string(config.optimizer)},
                           {"learning_rate", config.learning_rate},
                           {"epochs", config.epochs},
                           {"batch_size", config.batch_size},
                           {"leaky_slope", spec.leaky_slope},
                           {"cumulative_feedthrough", config.cumulative_feedthrough}}},
      {"features", {{"drop_q1", policy.drop_q1},
                    {"drop_joint6", policy.drop_joint6},
                    {"input_dimension", policy.input_dimension()},
                    {"inputs", train_fs.input_names},
                    {"targets", train_fs.target_names}}},
      {"avg_test_mse", avg},
      {"full_test_mse", eval_std.mse},
      {"full_test_mse_nm", eval_nm.mse},
      {"final_train_mse", train_curve.back()},
      {"per_joint", per_joint},
      {"curves", {{"epoch", epochs}, {"train_mse", train_curve}, {"test_mse", test_curve}}},
      {"subnets", subnets},
      {"provenance", {{"seed", config.seed},
                      {"data_sha256", data_sha256},
                      {"train_fraction", config.train_fraction},
                      {"train_rows", train_ds.size()},
                      {"test_rows", test_ds.size()}}}};
  return out;
}

namespace {

std::string predictions_csv(const Eigen::MatrixXd& actual, const Eigen::MatrixXd& predicted,
                            const std::vector<std::string>& targets, std::size_t limit) {
  std::string out = "index";
  for (const auto& t : targets) out += "," + t + "_actual," + t + "_predicted";
  out += '\n';
  const auto rows = std::min<Eigen::Index>(actual.rows(), static_cast<Eigen::Index>(limit));
  for (Eigen::Index i = 0; i < rows; ++i) {
    out += std::to_string(i);
    for (Eigen::Index c = 0; c < actual.cols(); ++c) {
      out += "," + format_double(actual(i, c)) + "," + format_double(predicted(i, c));
    }
    out += '\n';
  }
  return out;
}

acquisition::Dataset load_data(const fs::path& path, std::string& sha) {
  sha = sha256_file(path);
  return read_dataset_csv(path);
}

}  // namespace

Json cmd_train(const TrainOptions& options, std::ostream& log) {
  std::string sha;
  const acquisition::Dataset data = load_data(options.data, sha);
  RunOutcome r = run_training(data, sha, options.run);
  r.metrics["source"] = options.tag;

  const auto& model = r.training.model;
  for (const auto& name : model.input_scaler.guarded) log << "warning: constant input column '" << name << "'\n";
  for (const auto& name : model.target_scaler.guarded) log << "warning: constant target column '" << name << "'\n";

  if (options.model_out) write_json_file(*options.model_out, model_to_json(model, r.metrics["provenance"]));
  if (options.metrics_out) write_json_file(*options.metrics_out, r.metrics);
  if (options.predictions_out) {
    write_text_file(*options.predictions_out, predictions_csv(r.test_actual_nm, r.test_predicted_nm, model.target_names, options.prediction_rows));
  }

  const auto& hist = r.training.combined;
  for (std::size_t e = 0; e < hist.epochs(); ++e) {
    log << "epoch " << e + 1 << ": train_mse=" << format_double(r.metrics["curves"]["train_mse"][e].get<double>())
        << " test_mse=" << format_double(r.metrics["curves"]["test_mse"][e].get<double>())
        << " wall_s=" << format_double(hist.epoch_seconds[e]) << '\n';
  }
  log << "avg_test_mse: " << format_double(r.metrics["avg_test_mse"].get<double>()) << '\n';
  log << "full_test_mse: " << format_double(r.metrics["full_test_mse"].get<double>()) << '\n';
  log << "provenance: command=train seed=" << options.run.seed << " data_sha256=" << sha << '\n';
  return r.metrics;
}

std::size_t cmd_predict(const fs::path& model_path, const fs::path& data, const fs::path& out, std::ostream& log) {
  arch::TorqueModel model;
  try {
    model = model_from_json(read_json_file(model_path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(model_path.string() + ": " + e.what());
  }
  std::string sha;
  const acquisition::Dataset ds = load_data(data, sha);
  const auto fs_all = preprocessing::select_features(ds, model.spec.policy);
  const arch::Prediction pred = arch::predict(model, fs_all.inputs);
  write_text_file(out, predictions_csv(fs_all.targets, pred.newton_meters, fs_all.target_names, ds.size()));
  log << "rows: " << ds.size() << '\n';
  log << "full_mse_nm: " << format_double(nn::mse(pred.newton_meters, fs_all.targets).mse) << '\n';
  log << "provenance: command=predict model_sha256=" << sha256_file(model_path) << " data_sha256=" << sha << '\n';
  return ds.size();
}

// --------------------------------------------------------------------- hpo

Json cmd_hpo(const HpoOptions& options, std::ostream& log) {
  std::string sha;
  const acquisition::Dataset data = load_data(options.data, sha);
  const int subnets = options.base.architecture == ArchitectureKind::Single ? 1 : 3;
  const hpo::SearchSpace space = hpo::torque_search_space(subnets);

  auto objective = [&](const hpo::Assignment& a, std::uint64_t seed) {
    RunConfig cfg = options.base;
    cfg.hidden.clear();
    for (int i = 0; i < subnets; ++i) cfg.hidden.push_back(static_cast<int>(a.integer(static_cast<std::size_t>(i))));
    cfg.optimizer = nn::parse_optimizer(a.category(static_cast<std::size_t>(subnets)));
    cfg.learning_rate = a.real(static_cast<std::size_t>(subnets) + 1);
    cfg.seed = seed;
    const RunOutcome r = run_training(data, sha, cfg);
    hpo::ObjectiveResult res;
    res.value = r.metrics["avg_test_mse"].get<double>();
    res.metrics = {{"avg_test_mse", res.value},
                   {"full_test_mse", r.metrics["full_test_mse"].get<double>()},
                   {"full_test_mse_nm", r.metrics["full_test_mse_nm"].get<double>()},
                   {"final_train_mse", r.metrics["final_train_mse"].get<double>()}};
    return res;
  };

  const hpo::Study study =
      hpo::run_study(objective, space, options.trials, options.study_seed, options.settings, options.base.seed);

  Json j = hpo::study_to_json(study);
  j["experiment"] = Json{{"architecture", arch::to_string(options.base.architecture)},
                         {"scaled", options.base.scale},
                         {"epochs", options.base.epochs},
                         {"batch_size", options.base.batch_size},
                         {"drop_q1", options.base.drop_q1},
                         {"drop_joint6", options.base.drop_joint6},
                         {"cumulative_feedthrough", options.base.cumulative_feedthrough},
                         {"training_seed", options.base.seed},
                         {"data_sha256", sha}};
  if (options.out) write_json_file(*options.out, j);

  for (const auto& t : study.trials) {
    log << "trial " << t.index << ": "
        << (t.status == hpo::TrialStatus::Complete ? "objective=" + format_double(t.objective) : "failed (" + t.error + ")")
        << " params=" << hpo::assignment_to_json(space, t.params).dump() << " wall_s=" << format_double(t.wall_seconds)
        << '\n';
  }
  log << "provenance: command=hpo study_seed=" << options.study_seed << " training_seed=" << options.base.seed
      << " data_sha256=" << sha << '\n';
  if (!study.best_index) throw NumericalError("no trial completed");
  log << "best: " << format_best_assignment(j) << '\n';
  return j;
}

namespace {

std::string join_hidden(const std::vector<int>& hidden, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < hidden.size(); ++i) out += (i ? sep : "") + std::to_string(hidden[i]);
  return out;
}

struct BestTrial {
  std::vector<int> hidden;
  std::string optimizer;
  double lr = 0.0;
  const Json* trial = nullptr;
};

BestTrial best_of(const Json& study) {
  const Json& best = study.at("best_index");
  if (best.is_null()) throw ValidationError("study has no completed trial");
  BestTrial b;
  b.trial = &study.at("trials").at(best.get<std::size_t>());
  for (const auto& [key, value] : b.trial->at("params").items()) {
    if (key.rfind("hidden", 0) == 0) b.hidden.push_back(value.get<int>());
  }
  b.optimizer = b.trial->at("params").at("optimizer").get<std::string>();
  b.lr = b.trial->at("params").at("learning_rate").get<double>();
  return b;
}

}  // namespace

std::string format_best_assignment(const Json& study) {
  const BestTrial b = best_of(study);
  char lr[32];
  std::snprintf(lr, sizeof(lr), "%.6e", b.lr);
  return study.at("experiment").at("architecture").get<std::string>() + " | " + join_hidden(b.hidden, ", ") + " | " +
         b.optimizer + " | " + lr;
}

// ------------------------------------------------------------------ report

namespace {

struct ReportRow {
  std::string arch;
  bool scaled = true;
  double avg = 0.0;
  double full = 0.0;
  std::vector<int> hidden;
  std::string optimizer;
  double lr = 0.0;
  std::string source;
};

ReportRow row_from(const Json& j, const fs::path& path) {
  const std::string schema = j.at("schema").get<std::string>();
  ReportRow r;
  if (schema == "torqueid.metrics/1") {
    r.arch = j.at("architecture").get<std::string>();
    r.scaled = j.at("scaled").get<bool>();
    r.avg = j.at("avg_test_mse").get<double>();
    r.full = j.at("full_test_mse").get<double>();
    const Json& hp = j.at("hyperparameters");
    r.hidden = hp.at("hidden").get<std::vector<int>>();
    r.optimizer = hp.at("optimizer").get<std::string>();
    r.lr = hp.at("learning_rate").get<double>();
    r.source = j.at("source").get<std::string>();
  } else if (schema == "torqueid.study/1") {
    const BestTrial b = best_of(j);
    r.arch = j.at("experiment").at("architecture").get<std::string>();
    r.scaled = j.at("experiment").at("scaled").get<bool>();
    r.avg = b.trial->at("metrics").at("avg_test_mse").get<double>();
    r.full = b.trial->at("metrics").at("full_test_mse").get<double>();
    r.hidden = b.hidden;
    r.optimizer = b.optimizer;
    r.lr = b.lr;
    r.source = "optimized";
  } else {
    throw ValidationError(path.string() + ": unsupported schema '" + schema + "'");
  }
  return r;
}

}  // namespace

std::string cmd_report(const std::vector<fs::path>& inputs, const std::optional<fs::path>& out, std::ostream& log) {
  if (inputs.empty()) throw ValidationError("report needs at least one input");
  std::vector<ReportRow> rows;
  for (const auto& p : inputs) {
    if (!fs::exists(p)) throw ValidationError("missing input '" + p.string() + "'");
    const Json j = read_json_file(p);
    try {
      rows.push_back(row_from(j, p));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(p.string() + ": " + e.what());
    }
  }

  std::string csv = std::string(kReportHeader) + "\n";
  for (const ReportRow& r : rows) {
    std::string delta;
    if (r.source != "baseline") {
      for (const ReportRow& b : rows) {
        if (b.source == "baseline" && b.arch == r.arch && b.scaled == r.scaled) {
          delta = format_double(r.full - b.full);
          break;
        }
      }
    }
    csv += r.arch + "," + (r.scaled ? "with" : "without") + "," + format_double(r.avg) + "," + format_double(r.full) +
           "," + join_hidden(r.hidden, ";") + "," + r.optimizer + "," + format_double(r.lr) + "," + r.source + "," +
           delta + "\n";
  }
  if (out) write_text_file(*out, csv);
  log << csv;
  return csv;
}

// -------------------------------------------------------------------- plot

namespace {

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t pos = 0;
  for (;;) {
    const auto comma = line.find(',', pos);
    cells.emplace_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, const fs::path& path, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw ValidationError(path.string() + ":" + std::to_string(line) + ": malformed number '" + cell + "'");
  }
  return v;
}

}  // namespace

PlotResult cmd_plot(const fs::path& input, const fs::path& out, std::ostream& log) {
  PlotResult result;
  result.sidecar = fs::path(out).replace_extension(".csv");
  std::vector<plot::Panel> panels;
  std::string sidecar;
  int columns = 1;

  if (input.extension() == ".json") {
    const Json j = read_json_file(input);
    try {
      const Json& c = j.at("curves");
      const auto epochs = c.at("epoch").get<std::vector<double>>();
      const auto train = c.at("train_mse").get<std::vector<double>>();
      const auto test = c.at("test_mse").get<std::vector<double>>();
      if (epochs.size() != train.size() || epochs.size() != test.size() || epochs.empty()) {
        throw ValidationError(input.string() + ": curve lengths differ");
      }
      panels.push_back({"Train and test MSE", "epoch", "MSE", {{"train", epochs, train}, {"test", epochs, test}}});
      sidecar = "epoch,train_mse,test_mse\n";
      for (std::size_t e = 0; e < epochs.size(); ++e) {
        sidecar += format_double(epochs[e]) + "," + format_double(train[e]) + "," + format_double(test[e]) + "\n";
      }
      result.rows = epochs.size();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(input.string() + ": " + e.what());
    }
  } else {
    const std::string text = read_text_file(input);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(input.string() + ": empty file");
    const auto header = split_line(line);
    if (header.size() < 3 || header[0] != "index" || (header.size() - 1) % 2 != 0) {
      throw ValidationError(input.string() + ": expected 'index,<name>_actual,<name>_predicted,...' header");
    }
    const std::size_t joints = (header.size() - 1) / 2;
    std::vector<std::string> names;
    for (std::size_t k = 0; k < joints; ++k) {
      const std::string& a = header[1 + 2 * k];
      const std::string& p = header[2 + 2 * k];
      const auto cut = a.rfind("_actual");
      if (cut == std::string::npos || p != a.substr(0, cut) + "_predicted") {
        throw ValidationError(input.string() + ": column pair '" + a + "," + p + "' is not actual/predicted");
      }
      names.push_back(a.substr(0, cut));
    }
    std::vector<plot::Series> actual(joints), predicted(joints);
    std::size_t line_no = 1;
    sidecar = line + "\n";
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto cells = split_line(line);
      if (cells.size() != header.size()) {
        throw ValidationError(input.string() + ":" + std::to_string(line_no) + ": wrong column count");
      }
      const double x = parse_cell(cells[0], input, line_no);
      for (std::size_t k = 0; k < joints; ++k) {
        actual[k].x.push_back(x);
        predicted[k].x.push_back(x);
        actual[k].y.push_back(parse_cell(cells[1 + 2 * k], input, line_no));
        predicted[k].y.push_back(parse_cell(cells[2 + 2 * k], input, line_no));
      }
      sidecar += line + "\n";
      ++result.rows;
    }
    if (result.rows == 0) throw ValidationError(input.string() + ": no samples");
    for (std::size_t k = 0; k < joints; ++k) {
      actual[k].label = "actual";
      predicted[k].label = "predicted";
      panels.push_back({names[k], "sample", "torque [N*m]", {actual[k], predicted[k]}});
    }
    columns = 2;
  }

  result.panels = panels.size();
  write_text_file(out, plot::render_svg(panels, columns));
  write_text_file(result.sidecar, sidecar);
  log << "panels: " << result.panels << " rows: " << result.rows << " sidecar: " << result.sidecar.string() << '\n';
  return result;
}

}  // namespace torqueid::experiment
