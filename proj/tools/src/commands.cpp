#include "cavity_et/cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cavity_et/cli/format.hpp"
#include "cavity_et/cli/sweep.hpp"

namespace cavity_et::cli {

std::vector<double> time_grid(const RunConfig& config, const RunOptions& options,
                              double default_t_max) {
  const double t_max = config.t_max.value_or(default_t_max);
  if (!(options.t_min > 0.0) || !(t_max > options.t_min))
    throw ConfigError("t_max", "time grid needs 0 < t_min < t_max");
  if (options.points_per_decade < 1)
    throw ConfigError("points_per_decade", "points per decade must be >= 1");
  const double decades = std::log10(t_max / options.t_min);
  const auto count = static_cast<std::size_t>(std::ceil(decades * options.points_per_decade)) + 1;
  return log_grid(options.t_min, t_max, count);
}

std::uint64_t resolve_seed(const RunConfig& config, const RunOptions& options) {
  return options.seed.value_or(config.seed.value_or(kDefaultSeed));
}

RateBreakdown cmd_rate(const RunConfig& config, std::optional<std::int64_t> ground_count) {
  const std::int64_t m = ground_count.value_or(config.params.n_pairs);
  if (m < 1) throw ConfigError("M", "ground count M must be >= 1");
  return transfer_rate(config.params, m);
}

void write_rate_json(std::ostream& out, const RunConfig& config, const RateBreakdown& r) {
  const ModelParams& p = config.params;
  const double g_c = collective_coupling(p, r.ground_count);
  out << "{\n"
      << "  \"M\": " << r.ground_count << ",\n"
      << "  \"g_c\": " << json_double(g_c) << ",\n"
      << "  \"r_tot\": " << json_double(r.r_tot) << ",\n"
      << "  \"r_cav\": " << json_double(r.r_cav) << ",\n"
      << "  \"r_ind\": " << json_double(r.r_ind) << ",\n"
      << "  \"r_bare\": " << json_double(r.r_bare) << ",\n"
      << "  \"r_cav_over_r_bare\": " << json_double(r.r_cav / r.r_bare) << ",\n"
      << "  \"imag_residual\": " << json_double(r.imag_residual) << "\n"
      << "}\n";
}

std::vector<double> effective_rates(const ModelParams& params, std::size_t threads) {
  const auto table = rate_table(params, params.n_pairs, threads);
  for (const RateBreakdown& entry : table) {
    if (entry.exceptional) {
      // Recompute to surface the diagnostic of the first failing ground count.
      (void)transfer_rate(params, entry.ground_count);
    }
  }
  return total_rates(table);
}

TrajectoryEnsemble cmd_evolve(const RunConfig& config, const RunOptions& options) {
  const std::vector<double> rates = effective_rates(config.params, options.threads);
  return run_ensemble(rates, config.n_trajectories.value_or(kDefaultTrajectories),
                      resolve_seed(config, options), time_grid(config, options, kDefaultEvolveTimeMax),
                      options.threads);
}

void write_evolve_csv(std::ostream& out, const TrajectoryEnsemble& e) {
  out << "t,mean_NG,stderr_NG\n";
  for (std::size_t k = 0; k < e.t_grid.size(); ++k)
    out << format_double(e.t_grid[k]) << ',' << format_double(e.mean_NG[k]) << ','
        << format_double(e.stderr_NG[k]) << '\n';
}

FullSimEnsemble cmd_fullsim(const RunConfig& config, const RunOptions& options) {
  const FullSimulator sim(config.params, config.dt);
  return sim.run_ensemble(time_grid(config, options, kDefaultFullSimTimeMax),
                          config.n_trajectories.value_or(kDefaultTrajectories),
                          resolve_seed(config, options), options.threads);
}

void write_fullsim_csv(std::ostream& out, const FullSimEnsemble& e) {
  out << "t,mean_NG,stderr_NG,mean_Ne\n";
  for (std::size_t k = 0; k < e.t_grid.size(); ++k)
    out << format_double(e.t_grid[k]) << ',' << format_double(e.mean_NG[k]) << ','
        << format_double(e.stderr_NG[k]) << ',' << format_double(e.mean_Ne[k]) << '\n';
}

std::vector<std::filesystem::path> cmd_figures(const Json& recipe,
                                               const std::filesystem::path& out_dir,
                                               const RunOptions& options, std::ostream& log) {
  if (!recipe.is_object() || !recipe.contains("datasets") || !recipe.at("datasets").is_array() ||
      recipe.at("datasets").empty())
    throw ConfigError("datasets", "figure recipe needs a non-empty 'datasets' array");
  for (const auto& [key, value] : recipe.items())
    if (key != "figure" && key != "datasets" && key != "description")
      throw ConfigError(key, "unknown recipe key '" + key + "'");

  // Parse everything first so a typo in the last dataset fails before any work.
  struct Job {
    std::string name, command;
    Json config;
  };
  std::vector<Job> jobs;
  std::set<std::string> names;
  for (const Json& d : recipe.at("datasets")) {
    if (!d.is_object() || !d.contains("name") || !d.contains("command") || !d.contains("config"))
      throw ConfigError("datasets", "each dataset needs 'name', 'command' and 'config'");
    for (const auto& [key, value] : d.items())
      if (key != "name" && key != "command" && key != "config")
        throw ConfigError(key, "unknown dataset key '" + key + "'");
    Job job{d.at("name").get<std::string>(), d.at("command").get<std::string>(), d.at("config")};
    if (job.name.empty() || job.name.find_first_of("/\\") != std::string::npos ||
        !names.insert(job.name).second)
      throw ConfigError("name", "dataset names must be unique plain file names");
    if (job.command == "sweep") {
      (void)parse_sweep_spec(job.config);
    } else if (job.command == "evolve" || job.command == "fullsim") {
      (void)parse_run_config(job.config);
    } else {
      throw ConfigError("command", "unknown dataset command '" + job.command + "'");
    }
    jobs.push_back(std::move(job));
  }

  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const Job& job : jobs) {
    const std::filesystem::path path = out_dir / (job.name + ".csv");
    std::ostringstream csv;
    if (job.command == "sweep") {
      write_sweep_csv(csv, run_sweep(parse_sweep_spec(job.config), options.threads));
    } else if (job.command == "evolve") {
      write_evolve_csv(csv, cmd_evolve(parse_run_config(job.config), options));
    } else {
      write_fullsim_csv(csv, cmd_fullsim(parse_run_config(job.config), options));
    }
    std::ofstream file(path);
    if (!file) throw ConfigError("out", "cannot write '" + path.string() + "'");
    file << csv.str();
    log << "wrote " << path.string() << '\n';
    written.push_back(path);
  }
  return written;
}

}  // namespace cavity_et::cli
