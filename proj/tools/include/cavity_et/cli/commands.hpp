#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cavity_et/cli/config.hpp"
#include "cavity_et/dynamics.hpp"
#include "cavity_et/fullsim.hpp"
#include "cavity_et/rates.hpp"

namespace cavity_et::cli {

inline constexpr std::uint64_t kDefaultSeed = 1;
inline constexpr std::int64_t kDefaultTrajectories = 1000;
inline constexpr double kDefaultTimeMin = 1e2;
inline constexpr double kDefaultEvolveTimeMax = 1e9;
inline constexpr double kDefaultFullSimTimeMax = 1e8;
inline constexpr int kDefaultPointsPerDecade = 20;

/// Settings shared by the trajectory commands; unset fields fall back to the
/// config file, then to the defaults above.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  double t_min = kDefaultTimeMin;
  int points_per_decade = kDefaultPointsPerDecade;
};

/// Log-spaced grid from t_min to t_max (config value or `default_t_max`).
std::vector<double> time_grid(const RunConfig& config, const RunOptions& options,
                              double default_t_max);

std::uint64_t resolve_seed(const RunConfig& config, const RunOptions& options);

/// Rate breakdown at M ground-state pairs (default: N_total).
RateBreakdown cmd_rate(const RunConfig& config, std::optional<std::int64_t> ground_count);
void write_rate_json(std::ostream& out, const RunConfig& config, const RateBreakdown& rates);

/// Rates for M = 1..N. Throws ExceptionalPointError naming the first bad M.
std::vector<double> effective_rates(const ModelParams& params, std::size_t threads);

TrajectoryEnsemble cmd_evolve(const RunConfig& config, const RunOptions& options);
void write_evolve_csv(std::ostream& out, const TrajectoryEnsemble& ensemble);

FullSimEnsemble cmd_fullsim(const RunConfig& config, const RunOptions& options);
void write_fullsim_csv(std::ostream& out, const FullSimEnsemble& ensemble);

/// Runs every dataset of a figure recipe and writes `<out_dir>/<name>.csv`.
/// Returns the written paths in recipe order.
///
/// Recipe: {"figure": "...", "datasets": [{"name", "command", "config"}]} with
/// command one of sweep | evolve | fullsim and config the matching document.
std::vector<std::filesystem::path> cmd_figures(const Json& recipe,
                                               const std::filesystem::path& out_dir,
                                               const RunOptions& options, std::ostream& log);

}  // namespace cavity_et::cli
