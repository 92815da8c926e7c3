#include "cavity_et/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace cavity_et::cli {

namespace {

double number(const Json& doc, const std::string& key) {
  const Json& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(key, "parameter '" + key + "' must be a number");
  return v.get<double>();
}

std::int64_t integer(const Json& doc, const std::string& key) {
  const Json& v = doc.at(key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  // Accept integral floating values such as 1e4.
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e15)
      return static_cast<std::int64_t>(d);
  }
  throw ConfigError(key, "parameter '" + key + "' must be an integer");
}

const std::set<std::string>& optional_keys() {
  static const std::set<std::string> keys{"seed", "n_trajectories", "t_max", "dt", "unit"};
  return keys;
}

}  // namespace

const std::vector<std::string>& model_keys() {
  static const std::vector<std::string> keys{"g",   "kappa", "kappa_plus", "gamma", "gamma_plus",
                                             "eta", "delta", "V",          "N_total"};
  return keys;
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", "malformed config file '" + path.string() + "': " + e.what());
  }
}

RunConfig parse_run_config(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  const std::set<std::string> known(model_keys().begin(), model_keys().end());
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key) && !optional_keys().contains(key))
      throw ConfigError(key, "unknown config key '" + key + "'");
  }
  for (const auto& key : model_keys()) {
    if (!doc.contains(key)) throw ConfigError(key, "missing config key '" + key + "'");
  }

  RunConfig cfg;
  ModelParams& p = cfg.params;
  p.coupling = number(doc, "g");
  p.cavity_decay = number(doc, "kappa");
  p.cavity_pump = number(doc, "kappa_plus");
  p.pair_decay = number(doc, "gamma");
  p.pair_pump = number(doc, "gamma_plus");
  p.acceptor_relaxation = number(doc, "eta");
  p.detuning = number(doc, "delta");
  p.tunneling = number(doc, "V");
  p.n_pairs = integer(doc, "N_total");
  validate(p);

  if (doc.contains("seed")) {
    const std::int64_t s = integer(doc, "seed");
    if (s < 0) throw ConfigError("seed", "parameter 'seed' must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (doc.contains("n_trajectories")) {
    cfg.n_trajectories = integer(doc, "n_trajectories");
    if (*cfg.n_trajectories < 2)
      throw ConfigError("n_trajectories", "parameter 'n_trajectories' must be >= 2");
  }
  if (doc.contains("t_max")) {
    cfg.t_max = number(doc, "t_max");
    if (!(*cfg.t_max > 0.0) || !std::isfinite(*cfg.t_max))
      throw ConfigError("t_max", "parameter 't_max' must be > 0");
  }
  if (doc.contains("dt")) {
    cfg.dt = number(doc, "dt");
    if (!(*cfg.dt > 0.0) || !std::isfinite(*cfg.dt))
      throw ConfigError("dt", "parameter 'dt' must be > 0");
  }
  if (doc.contains("unit")) {
    if (!doc.at("unit").is_string()) throw ConfigError("unit", "parameter 'unit' must be a string");
    cfg.unit = doc.at("unit").get<std::string>();
  }
  return cfg;
}

Json to_json(const RunConfig& config) {
  const ModelParams& p = config.params;
  Json doc{{"g", p.coupling},           {"kappa", p.cavity_decay},
           {"kappa_plus", p.cavity_pump}, {"gamma", p.pair_decay},
           {"gamma_plus", p.pair_pump},   {"eta", p.acceptor_relaxation},
           {"delta", p.detuning},         {"V", p.tunneling},
           {"N_total", p.n_pairs}};
  if (config.seed) doc["seed"] = *config.seed;
  if (config.n_trajectories) doc["n_trajectories"] = *config.n_trajectories;
  if (config.t_max) doc["t_max"] = *config.t_max;
  if (config.dt) doc["dt"] = *config.dt;
  if (config.unit) doc["unit"] = *config.unit;
  return doc;
}

}  // namespace cavity_et::cli
