#include "torqueid/model_io.hpp"

#include "torqueid/dataset_io.hpp"
#include "torqueid/errors.hpp"
#include "torqueid/keyvalue.hpp"

namespace torqueid {

namespace {

constexpr const char* kModelSchema = "torqueid.model/1";

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

Json scaler_to_json(const preprocessing::ScalerStats& s) {
  return Json{{"names", s.names}, {"mean", to_vector(s.mean)}, {"stddev", to_vector(s.stddev)}, {"guarded", s.guarded}};
}

preprocessing::ScalerStats scaler_from_json(const Json& j) {
  return guarded("scaler", [&] {
    preprocessing::ScalerStats s;
    s.names = j.at("names").get<std::vector<std::string>>();
    s.mean = from_vector(j.at("mean").get<std::vector<double>>());
    s.stddev = from_vector(j.at("stddev").get<std::vector<double>>());
    if (j.contains("guarded")) s.guarded = j.at("guarded").get<std::vector<std::string>>();
    if (s.mean.size() != static_cast<Eigen::Index>(s.names.size()) || s.stddev.size() != s.mean.size()) {
      throw ValidationError("scaler: inconsistent lengths");
    }
    return s;
  });
}

Json mlp_to_json(const nn::MlpParams& p) {
  Json layers = Json::array();
  for (const auto& l : p.layers) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(l.weights.size()));
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) w.push_back(l.weights(r, c));
    }
    layers.push_back(Json{{"rows", l.weights.rows()}, {"cols", l.weights.cols()}, {"weights", w},
                          {"bias", to_vector(l.bias)}});
  }
  return Json{{"layer_sizes", p.layer_sizes()}, {"leaky_slope", p.leaky_slope}, {"layers", layers}};
}

nn::MlpParams mlp_from_json(const Json& j) {
  return guarded("network", [&] {
    nn::MlpParams p;
    p.leaky_slope = j.at("leaky_slope").get<double>();
    for (const auto& lj : j.at("layers")) {
      const auto rows = lj.at("rows").get<Eigen::Index>();
      const auto cols = lj.at("cols").get<Eigen::Index>();
      const auto w = lj.at("weights").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(w.size()) != rows * cols) throw ValidationError("network: weight count mismatch");
      nn::DenseLayer layer;
      layer.weights = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          w.data(), rows, cols);
      layer.bias = from_vector(lj.at("bias").get<std::vector<double>>());
      if (layer.bias.size() != rows) throw ValidationError("network: bias length mismatch");
      if (!p.layers.empty() && p.layers.back().weights.rows() != cols) {
        throw ValidationError("network: consecutive layer shapes do not chain");
      }
      p.layers.push_back(std::move(layer));
    }
    if (p.layers.empty() || !p.all_finite()) throw ValidationError("network: empty or non-finite parameters");
    return p;
  });
}

Json model_to_json(const arch::TorqueModel& m, const Json& provenance) {
  const auto& pol = m.spec.policy;
  Json subnets = Json::array();
  for (const auto& s : m.subnets) {
    subnets.push_back(Json{{"name", s.name},
                           {"wiring", {{"feed_columns", s.feed_columns},
                                       {"state_columns", s.state_columns},
                                       {"output_columns", s.output_columns}}},
                           {"network", mlp_to_json(s.params)}});
  }
  return Json{{"schema", kModelSchema},
              {"architecture", arch::to_string(m.spec.kind)},
              {"hidden", m.spec.hidden},
              {"cumulative_feedthrough", m.spec.cumulative_feedthrough},
              {"init_seed", m.spec.seed},
              {"trained", m.trained},
              {"features", {{"drop_q1", pol.drop_q1},
                            {"drop_joint6", pol.drop_joint6},
                            {"standardize_inputs", pol.standardize_inputs},
                            {"standardize_targets", pol.standardize_targets},
                            {"inputs", m.input_names},
                            {"targets", m.target_names}}},
              {"input_scaler", scaler_to_json(m.input_scaler)},
              {"target_scaler", scaler_to_json(m.target_scaler)},
              {"subnets", subnets},
              {"provenance", provenance}};
}

arch::TorqueModel model_from_json(const Json& j) {
  return guarded("model", [&] {
    if (j.at("schema").get<std::string>() != kModelSchema) throw ValidationError("model: unsupported schema");
    arch::ArchitectureSpec spec;
    spec.kind = arch::parse_architecture(j.at("architecture").get<std::string>());
    spec.hidden = j.at("hidden").get<std::vector<int>>();
    spec.cumulative_feedthrough = j.at("cumulative_feedthrough").get<bool>();
    spec.seed = j.at("init_seed").get<std::uint64_t>();
    const Json& f = j.at("features");
    spec.policy.drop_q1 = f.at("drop_q1").get<bool>();
    spec.policy.drop_joint6 = f.at("drop_joint6").get<bool>();
    spec.policy.standardize_inputs = f.at("standardize_inputs").get<bool>();
    spec.policy.standardize_targets = f.at("standardize_targets").get<bool>();

    // Rebuild the wiring from the architecture description, then check it matches the file.
    arch::TorqueModel m = arch::build(spec);
    const Json& subnets = j.at("subnets");
    if (subnets.size() != m.subnets.size()) throw ValidationError("model: subnet count mismatch");
    for (std::size_t i = 0; i < m.subnets.size(); ++i) {
      const Json& sj = subnets[i];
      arch::Subnet& s = m.subnets[i];
      const Json& w = sj.at("wiring");
      if (sj.at("name").get<std::string>() != s.name ||
          w.at("feed_columns").get<std::vector<int>>() != s.feed_columns ||
          w.at("state_columns").get<std::vector<int>>() != s.state_columns ||
          w.at("output_columns").get<std::vector<int>>() != s.output_columns) {
        throw ValidationError("model: wiring of subnet '" + s.name + "' does not match its architecture");
      }
      nn::MlpParams p = mlp_from_json(sj.at("network"));
      if (p.input_size() != s.input_size() || p.output_size() != static_cast<int>(s.output_columns.size())) {
        throw ValidationError("model: network shape of subnet '" + s.name + "' does not match its wiring");
      }
      s.params = std::move(p);
    }
    m.input_scaler = scaler_from_json(j.at("input_scaler"));
    m.target_scaler = scaler_from_json(j.at("target_scaler"));
    if (m.input_scaler.names != m.input_names || m.target_scaler.names != m.target_names) {
      throw ValidationError("model: scaler columns do not match the feature policy");
    }
    m.trained = j.at("trained").get<bool>();
    return m;
  });
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace torqueid
