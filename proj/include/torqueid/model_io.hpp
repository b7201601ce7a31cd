#pragma once

#include <filesystem>

#include <json.hpp>

#include "torqueid/architectures.hpp"

namespace torqueid {

using Json = nlohmann::ordered_json;

Json scaler_to_json(const preprocessing::ScalerStats& stats);
preprocessing::ScalerStats scaler_from_json(const Json& j);

Json mlp_to_json(const nn::MlpParams& params);
nn::MlpParams mlp_from_json(const Json& j);

/// Model artifact: architecture, feature policy, wiring, per-layer row-major
/// weights and biases, both scalers and a caller-supplied provenance block.
Json model_to_json(const arch::TorqueModel& model, const Json& provenance = Json::object());
arch::TorqueModel model_from_json(const Json& j);

/// Parses a JSON file; throws IoError / ValidationError.
Json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace torqueid
