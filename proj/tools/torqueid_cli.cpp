#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "torqueid/dataset_io.hpp"
#include "torqueid/errors.hpp"
#include "torqueid/experiment.hpp"

namespace ex = torqueid::experiment;
namespace fs = std::filesystem;

namespace {

struct TrainFlags {
  std::string arch = "single";
  bool no_scale = false;
  std::string optimizer = "adam";
  bool keep_q1 = false;
};

void add_run_flags(CLI::App* cmd, ex::RunConfig& run, TrainFlags& flags, bool searched) {
  cmd->add_option("--arch", flags.arch, "single, multiple or cascade")->capture_default_str();
  cmd->add_flag("--no-scale", flags.no_scale, "Skip standardization of inputs and targets");
  cmd->add_option("--epochs", run.epochs)->capture_default_str();
  cmd->add_option("--batch-size", run.batch_size, "0 trains on the full split per step")->capture_default_str();
  cmd->add_option("--seed", run.seed, "Initialisation and shuffling seed")->capture_default_str();
  cmd->add_option("--train-fraction", run.train_fraction)->capture_default_str();
  cmd->add_flag("--drop-joint6", run.drop_joint6, "Remove joint 6 features and target");
  cmd->add_flag("--keep-q1", flags.keep_q1, "Keep q1 as an input feature");
  cmd->add_flag("--cumulative", run.cumulative_feedthrough, "Cascade: feed every upstream prediction forward");
  if (!searched) {
    cmd->add_option("--hidden", run.hidden, "Hidden width per subnet")->delimiter(',');
    cmd->add_option("--optimizer", flags.optimizer, "sgd, adam or rmsprop")->capture_default_str();
    cmd->add_option("--lr", run.learning_rate)->capture_default_str();
  }
}

void resolve(ex::RunConfig& run, const TrainFlags& flags) {
  run.architecture = torqueid::arch::parse_architecture(flags.arch);
  run.scale = !flags.no_scale;
  run.optimizer = torqueid::nn::parse_optimizer(flags.optimizer);
  run.drop_q1 = !flags.keep_q1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint torque identification experiments"};
  app.require_subcommand(1);

  ex::GenDataOptions gen;
  std::string robot, sweep;
  bool no_shuffle = false;
  auto* gen_cmd = app.add_subcommand("gen-data", "Simulate a grid sweep and write the dataset CSV");
  gen_cmd->add_option("--robot", robot, "Robot parameter file (built-in model when omitted)");
  gen_cmd->add_option("--sweep", sweep, "Sweep file (built-in sweep when omitted)");
  gen_cmd->add_option("--out", gen.out)->required();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_flag("--no-shuffle", no_shuffle, "Keep rows in acquisition order");

  ex::TrainOptions train;
  TrainFlags train_flags;
  std::string model_out, metrics_out, predictions_out;
  auto* train_cmd = app.add_subcommand("train", "Train one architecture and write metrics");
  train_cmd->add_option("--data", train.data)->required();
  add_run_flags(train_cmd, train.run, train_flags, false);
  train_cmd->add_option("--tag", train.tag, "Source label used by report")->capture_default_str();
  train_cmd->add_option("--out-model", model_out);
  train_cmd->add_option("--metrics", metrics_out);
  train_cmd->add_option("--predictions", predictions_out, "Actual vs predicted test torques (CSV)");
  train_cmd->add_option("--prediction-rows", train.prediction_rows)->capture_default_str();

  ex::HpoOptions hpo;
  TrainFlags hpo_flags;
  std::string study_out;
  bool random_only = false;
  auto* hpo_cmd = app.add_subcommand("hpo", "Search hidden sizes, optimizer and learning rate with TPE");
  hpo_cmd->add_option("--data", hpo.data)->required();
  add_run_flags(hpo_cmd, hpo.base, hpo_flags, true);
  hpo_cmd->add_option("--trials", hpo.trials)->capture_default_str();
  hpo_cmd->add_option("--study-seed", hpo.study_seed, "Sampler seed")->capture_default_str();
  hpo_cmd->add_flag("--random", random_only, "Random search instead of TPE");
  hpo_cmd->add_option("--out", study_out);

  std::vector<fs::path> report_inputs;
  std::string report_out;
  auto* report_cmd = app.add_subcommand("report", "Tabulate metrics and study files");
  report_cmd->add_option("inputs", report_inputs)->required();
  report_cmd->add_option("--out", report_out);

  fs::path plot_in, plot_out;
  auto* plot_cmd = app.add_subcommand("plot", "Render a loss or actual-vs-predicted SVG");
  plot_cmd->add_option("--input", plot_in)->required();
  plot_cmd->add_option("--out", plot_out)->required();

  fs::path pred_model, pred_data, pred_out;
  auto* predict_cmd = app.add_subcommand("predict", "Apply a saved model to a dataset");
  predict_cmd->add_option("--model", pred_model)->required();
  predict_cmd->add_option("--data", pred_data)->required();
  predict_cmd->add_option("--out", pred_out)->required();

  fs::path robot_template, sweep_template;
  auto* defaults_cmd = app.add_subcommand("export-defaults", "Write the built-in robot and sweep files");
  defaults_cmd->add_option("--robot", robot_template)->required();
  defaults_cmd->add_option("--sweep", sweep_template)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ex::kSuccess : ex::kInvalidInput;
  }

  auto opt_path = [](const std::string& s) { return s.empty() ? std::optional<fs::path>{} : fs::path(s); };
  try {
    if (*gen_cmd) {
      gen.robot_path = opt_path(robot);
      gen.sweep_path = opt_path(sweep);
      gen.shuffle = !no_shuffle;
      ex::gen_data(gen, std::cout);
    } else if (*train_cmd) {
      resolve(train.run, train_flags);
      train.model_out = opt_path(model_out);
      train.metrics_out = opt_path(metrics_out);
      train.predictions_out = opt_path(predictions_out);
      ex::cmd_train(train, std::cout);
    } else if (*hpo_cmd) {
      resolve(hpo.base, hpo_flags);
      hpo.settings.random_only = random_only;
      hpo.out = opt_path(study_out);
      ex::cmd_hpo(hpo, std::cout);
    } else if (*report_cmd) {
      ex::cmd_report(report_inputs, opt_path(report_out), std::cout);
    } else if (*plot_cmd) {
      ex::cmd_plot(plot_in, plot_out, std::cout);
    } else if (*defaults_cmd) {
      torqueid::write_text_file(robot_template, torqueid::format_robot(torqueid::default_robot()));
      torqueid::write_text_file(sweep_template, torqueid::acquisition::format_sweep(torqueid::acquisition::default_sweep()));
    } else if (*predict_cmd) {
      ex::cmd_predict(pred_model, pred_data, pred_out, std::cout);
    }
  } catch (...) {
    return ex::exit_code_for_current_exception(std::cerr);
  }
  return ex::kSuccess;
}
