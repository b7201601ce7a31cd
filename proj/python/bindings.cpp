#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "torqueid/dataset_io.hpp"
#include "torqueid/digest.hpp"
#include "torqueid/dynamics.hpp"
#include "torqueid/errors.hpp"
#include "torqueid/experiment.hpp"
#include "torqueid/keyvalue.hpp"

namespace py = pybind11;
using namespace torqueid;
namespace ex = torqueid::experiment;

namespace {

py::object to_python(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

RobotModel robot_or_default(const std::optional<std::string>& text) {
  return text ? parse_robot(*text, "<robot text>") : default_robot();
}

JointState make_state(const Vector6& q, const Vector6& qd, const Vector6& qdd) { return JointState{q, qd, qdd}; }

py::dict dataset_arrays(const acquisition::Dataset& d) {
  const auto n = static_cast<Eigen::Index>(d.size());
  Eigen::VectorXd t(n);
  Eigen::MatrixXd q(n, kNumJoints), qd(n, kNumJoints), qdd(n, kNumJoints), tau(n, kNumJoints);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = d.samples[static_cast<std::size_t>(i)];
    t(i) = s.t;
    q.row(i) = s.state.q.transpose();
    qd.row(i) = s.state.qd.transpose();
    qdd.row(i) = s.state.qdd.transpose();
    tau.row(i) = s.torque.tau.transpose();
  }
  py::dict out;
  out["t"] = t;
  out["q"] = q;
  out["qd"] = qd;
  out["qdd"] = qdd;
  out["tau"] = tau;
  out["seed"] = d.provenance.seed;
  out["robot_sha256"] = d.provenance.robot_digest;
  out["sweep_sha256"] = d.provenance.sweep_digest;
  return out;
}

ex::RunConfig run_config(const std::string& arch, bool scale, int epochs, const std::vector<int>& hidden,
                         const std::string& optimizer, double lr, std::size_t batch_size, std::uint64_t seed,
                         bool drop_joint6, bool keep_q1, bool cumulative) {
  ex::RunConfig c;
  c.architecture = arch::parse_architecture(arch);
  c.scale = scale;
  c.epochs = epochs;
  c.hidden = hidden;
  c.optimizer = nn::parse_optimizer(optimizer);
  c.learning_rate = lr;
  c.batch_size = batch_size;
  c.seed = seed;
  c.drop_joint6 = drop_joint6;
  c.drop_q1 = !keep_q1;
  c.cumulative_feedthrough = cumulative;
  return c;
}

hpo::SearchSpace space_from(const py::list& dims) {
  hpo::SearchSpace space;
  for (const py::handle& h : dims) {
    const auto d = h.cast<py::dict>();
    const auto name = d["name"].cast<std::string>();
    const auto type = d["type"].cast<std::string>();
    if (type == "int") {
      space.dimensions.push_back(hpo::IntDimension{name, d["low"].cast<std::int64_t>(), d["high"].cast<std::int64_t>()});
    } else if (type == "float") {
      const bool log = d.contains("log") && d["log"].cast<bool>();
      space.dimensions.push_back(hpo::FloatDimension{name, d["low"].cast<double>(), d["high"].cast<double>(), log});
    } else if (type == "categorical") {
      space.dimensions.push_back(hpo::CategoricalDimension{name, d["choices"].cast<std::vector<std::string>>()});
    } else {
      throw ValidationError("dimension '" + name + "': unknown type '" + type + "'");
    }
  }
  space.validate();
  return space;
}

}  // namespace

PYBIND11_MODULE(_torqueid, m) {
  m.doc() = "Joint torque identification: rigid-body oracle, datasets, MLP architectures and TPE search";

  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("default_robot_text", [] { return format_robot(default_robot()); },
        "Parameter file text of the built-in six-joint arm.");
  m.def("default_sweep_text", [] { return acquisition::format_sweep(acquisition::default_sweep()); },
        "Sweep file text of the built-in acquisition grid.");

  m.def(
      "inverse_dynamics",
      [](const Vector6& q, const Vector6& qd, const Vector6& qdd, bool friction, std::optional<std::string> robot) {
        return Vector6(dynamics::inverse_dynamics(robot_or_default(robot), make_state(q, qd, qdd),
                                                  friction ? dynamics::Friction::On : dynamics::Friction::Off)
                           .tau);
      },
      py::arg("q"), py::arg("qd"), py::arg("qdd"), py::arg("friction") = true, py::arg("robot") = py::none());
  m.def(
      "gravity_torque",
      [](const Vector6& q, std::optional<std::string> robot) {
        return Vector6(dynamics::gravity_torque(robot_or_default(robot), q).tau);
      },
      py::arg("q"), py::arg("robot") = py::none());
  m.def(
      "friction_torque",
      [](const Vector6& qd, std::optional<std::string> robot) {
        return Vector6(dynamics::friction_torque(robot_or_default(robot), qd).tau);
      },
      py::arg("qd"), py::arg("robot") = py::none());
  m.def(
      "mass_matrix",
      [](const Vector6& q, std::optional<std::string> robot) {
        return Matrix6(dynamics::mass_matrix(robot_or_default(robot), q));
      },
      py::arg("q"), py::arg("robot") = py::none());

  m.def(
      "generate_dataset",
      [](std::uint64_t seed, std::optional<std::string> robot, std::optional<std::string> sweep, bool shuffle) {
        acquisition::Dataset d;
        {
          py::gil_scoped_release release;
          const RobotModel model = robot_or_default(robot);
          const auto spec = sweep ? acquisition::parse_sweep(*sweep, "<sweep text>") : acquisition::default_sweep();
          d = acquisition::generate_grid_sweep(model, spec, seed);
          if (shuffle) d = acquisition::shuffle(std::move(d), seed);
        }
        return dataset_arrays(d);
      },
      py::arg("seed") = 0, py::arg("robot") = py::none(), py::arg("sweep") = py::none(), py::arg("shuffle") = false,
      "Simulated grid sweep as numpy arrays t, q, qd, qdd, tau (rows are samples).");

  m.def(
      "gen_data",
      [](const std::filesystem::path& out, std::uint64_t seed, std::optional<std::filesystem::path> robot,
         std::optional<std::filesystem::path> sweep, bool shuffle) {
        py::gil_scoped_release release;
        std::ostringstream log;
        const auto r = ex::gen_data({robot, sweep, out, seed, shuffle}, log);
        py::gil_scoped_acquire acquire;
        py::dict d;
        d["rows"] = r.rows;
        d["duration_seconds"] = r.duration_seconds;
        d["csv_sha256"] = r.csv_sha256;
        return d;
      },
      py::arg("out"), py::arg("seed") = 0, py::arg("robot") = py::none(), py::arg("sweep") = py::none(),
      py::arg("shuffle") = true);

  m.def(
      "train",
      [](const std::filesystem::path& data, const std::string& arch, bool scale, int epochs, std::vector<int> hidden,
         const std::string& optimizer, double lr, std::size_t batch_size, std::uint64_t seed, bool drop_joint6,
         bool keep_q1, bool cumulative, std::optional<std::filesystem::path> metrics,
         std::optional<std::filesystem::path> model, std::optional<std::filesystem::path> predictions) {
        ex::TrainOptions opt;
        opt.data = data;
        opt.run = run_config(arch, scale, epochs, hidden, optimizer, lr, batch_size, seed, drop_joint6, keep_q1, cumulative);
        opt.metrics_out = metrics;
        opt.model_out = model;
        opt.predictions_out = predictions;
        Json j;
        {
          py::gil_scoped_release release;
          std::ostringstream log;
          j = ex::cmd_train(opt, log);
        }
        return to_python(j);
      },
      py::arg("data"), py::arg("arch") = "single", py::arg("scale") = true, py::arg("epochs") = 10,
      py::arg("hidden") = std::vector<int>{}, py::arg("optimizer") = "adam", py::arg("lr") = 1e-3,
      py::arg("batch_size") = 64, py::arg("seed") = 0, py::arg("drop_joint6") = false, py::arg("keep_q1") = false,
      py::arg("cumulative") = false, py::arg("metrics") = py::none(), py::arg("model") = py::none(),
      py::arg("predictions") = py::none(), "Train one architecture on a dataset CSV; returns the metrics document.");

  m.def(
      "hpo",
      [](const std::filesystem::path& data, const std::string& arch, int trials, std::uint64_t study_seed,
         std::uint64_t seed, bool scale, int epochs, std::size_t batch_size, bool random_search,
         std::optional<std::filesystem::path> out) {
        ex::HpoOptions opt;
        opt.data = data;
        opt.base = run_config(arch, scale, epochs, {}, "adam", 1e-3, batch_size, seed, false, false, false);
        opt.trials = trials;
        opt.study_seed = study_seed;
        opt.settings.random_only = random_search;
        opt.out = out;
        Json j;
        {
          py::gil_scoped_release release;
          std::ostringstream log;
          j = ex::cmd_hpo(opt, log);
        }
        return to_python(j);
      },
      py::arg("data"), py::arg("arch") = "cascade", py::arg("trials") = 10, py::arg("study_seed") = 0,
      py::arg("seed") = 0, py::arg("scale") = true, py::arg("epochs") = 10, py::arg("batch_size") = 64,
      py::arg("random_search") = false, py::arg("out") = py::none(),
      "Search hidden sizes, optimizer and learning rate; returns the study document.");

  m.def(
      "report",
      [](const std::vector<std::filesystem::path>& inputs, std::optional<std::filesystem::path> out) {
        std::ostringstream log;
        return ex::cmd_report(inputs, out, log);
      },
      py::arg("inputs"), py::arg("out") = py::none());

  m.def(
      "plot",
      [](const std::filesystem::path& input, const std::filesystem::path& out) {
        std::ostringstream log;
        const auto r = ex::cmd_plot(input, out, log);
        py::dict d;
        d["panels"] = r.panels;
        d["rows"] = r.rows;
        d["sidecar"] = r.sidecar.string();
        return d;
      },
      py::arg("input"), py::arg("out"));

  m.def(
      "minimize",
      [](const std::function<double(py::dict)>& objective, const py::list& dimensions, int n_trials,
         std::uint64_t seed, bool random_search) {
        const hpo::SearchSpace space = space_from(dimensions);
        hpo::TpeSettings settings;
        settings.random_only = random_search;
        auto wrapped = [&](const hpo::Assignment& a, std::uint64_t) {
          const py::object params = to_python(hpo::assignment_to_json(space, a));
          return hpo::ObjectiveResult{objective(params.cast<py::dict>()), {}};
        };
        return to_python(hpo::study_to_json(hpo::run_study(wrapped, space, n_trials, seed, settings)));
      },
      py::arg("objective"), py::arg("dimensions"), py::arg("n_trials"), py::arg("seed") = 0,
      py::arg("random_search") = false,
      "TPE minimisation of a Python callable. Dimensions are dicts with name, type (int, float, categorical) "
      "and low/high/log or choices.");

  m.def("sha256_file", [](const std::filesystem::path& p) { return sha256_file(p); });
}
