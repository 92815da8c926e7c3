#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cavity_et/rates.hpp"

namespace cavity_et {

/// Effective-dynamics ensemble. The process carries no coherences: a trajectory
/// is fully described by its N jump times (pair i reaches |F> at jump_times[i]).
struct TrajectoryEnsemble {
  std::int64_t n_pairs = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> jump_times;
  std::vector<double> t_grid;
  std::vector<double> mean_NG;
  std::vector<double> stderr_NG;
};

/// Total rates r(M) for M = 1..N (element M-1) extracted from a rate table.
/// Throws StalledProcessError if an entry is not strictly positive.
std::vector<double> total_rates(const std::vector<RateBreakdown>& table);

/// Jump times t_i = t_{i-1} - ln(p_i) / r(N - i + 1) for given uniforms p_i in (0, 1).
std::vector<double> jump_times_from_uniforms(std::span<const double> rates,
                                             std::span<const double> uniforms);

/// One trajectory with uniforms drawn from a generator seeded by `seed`.
std::vector<double> sample_trajectory(std::span<const double> rates, std::uint64_t seed);

/// Pointwise mean and standard error of N_G(t) = N - #{jumps <= t}.
struct GroundCountStats {
  std::vector<double> mean;
  std::vector<double> stderr_mean;
};
GroundCountStats ensemble_stats(const std::vector<std::vector<double>>& trajectories,
                                std::int64_t n_pairs, std::span<const double> t_grid);

/// Samples `n_trajectories` trajectories (trajectory j uses trajectory_seed(seed, j))
/// and aggregates them on `t_grid`.
TrajectoryEnsemble run_ensemble(std::span<const double> rates, std::int64_t n_trajectories,
                                std::uint64_t seed, std::vector<double> t_grid,
                                std::size_t threads = 1);

/// Exact <N_G>(t) of the pure-death process with rates r(M) (matrix exponential
/// of the generator; intended for N up to a few hundred).
std::vector<double> exact_mean_ground_count(std::span<const double> rates,
                                            std::span<const double> t_grid);

/// `count` log-spaced points spanning [t_min, t_max].
std::vector<double> log_grid(double t_min, double t_max, std::size_t count);

/// 200 points spanning [1e2, 1e9].
std::vector<double> default_time_grid();

/// First time at which `mean` falls to `level`, log-interpolated on the grid.
/// Returns NaN if the level is never reached.
double crossing_time(std::span<const double> t_grid, std::span<const double> mean, double level);

/// d ln<N_G>/dt at the first grid point where <N_G> drops to `level`
/// (central difference). Returns NaN if not reached.
double log_slope_at_level(std::span<const double> t_grid, std::span<const double> mean,
                          double level);

}  // namespace cavity_et
