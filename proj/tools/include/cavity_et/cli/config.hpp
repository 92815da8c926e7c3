#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cavity_et/model.hpp"

namespace cavity_et::cli {

using Json = nlohmann::json;

/// Flat parameter file: the nine model fields plus optional run settings.
struct RunConfig {
  ModelParams params;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> n_trajectories;
  std::optional<double> t_max;
  std::optional<double> dt;
  std::optional<std::string> unit;  ///< documentation only
};

/// Reads and parses a JSON document; malformed input is a ConfigError.
Json load_json(const std::filesystem::path& path);

/// Parses a flat parameter document. Every model field is required, unknown
/// keys are rejected and the error names the offending key.
RunConfig parse_run_config(const Json& doc);

/// Serializes a config back to the flat document accepted by parse_run_config.
Json to_json(const RunConfig& config);

/// Model-field keys in canonical order.
const std::vector<std::string>& model_keys();

}  // namespace cavity_et::cli
