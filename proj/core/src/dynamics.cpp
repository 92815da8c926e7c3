#include "cavity_et/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "cavity_et/parallel.hpp"
#include "cavity_et/random.hpp"

namespace cavity_et {

namespace {

constexpr std::int64_t kExactMeanMaxPairs = 512;

void require_positive_rates(std::span<const double> rates) {
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!(rates[i] > 0.0) || !std::isfinite(rates[i])) {
      std::ostringstream msg;
      msg << "transfer rate r(M = " << i + 1 << ") = " << rates[i]
          << " is not positive; the jump process stalls";
      throw StalledProcessError(msg.str(), static_cast<long long>(i) + 1);
    }
  }
}

}  // namespace

std::vector<double> total_rates(const std::vector<RateBreakdown>& table) {
  std::vector<double> rates;
  rates.reserve(table.size());
  for (const auto& entry : table) rates.push_back(entry.r_tot);
  require_positive_rates(rates);
  return rates;
}

std::vector<double> jump_times_from_uniforms(std::span<const double> rates,
                                             std::span<const double> uniforms) {
  require_positive_rates(rates);
  const std::size_t n = rates.size();
  if (uniforms.size() != n) {
    throw DomainError("need exactly one uniform per pair");
  }
  std::vector<double> times(n);
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = uniforms[i];
    if (!(p > 0.0 && p < 1.0)) {
      throw DomainError("uniform draws must lie strictly inside (0, 1)");
    }
    // Before jump i (0-based) there are n - i ground-state pairs.
    t -= std::log(p) / rates[n - i - 1];
    times[i] = t;
  }
  return times;
}

std::vector<double> sample_trajectory(std::span<const double> rates, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> uniforms(rates.size());
  for (auto& p : uniforms) p = open_unit(rng);
  return jump_times_from_uniforms(rates, uniforms);
}

GroundCountStats ensemble_stats(const std::vector<std::vector<double>>& trajectories,
                                std::int64_t n_pairs, std::span<const double> t_grid) {
  if (trajectories.size() < 2) {
    throw DomainError("ensemble statistics need at least two trajectories");
  }
  const auto n_traj = static_cast<double>(trajectories.size());
  GroundCountStats out;
  out.mean.assign(t_grid.size(), 0.0);
  out.stderr_mean.assign(t_grid.size(), 0.0);
  std::vector<double> sum(t_grid.size(), 0.0);
  std::vector<double> sum_sq(t_grid.size(), 0.0);
  for (const auto& times : trajectories) {
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      const auto jumped = std::upper_bound(times.begin(), times.end(), t_grid[k]) - times.begin();
      const double n_g = static_cast<double>(n_pairs - jumped);
      sum[k] += n_g;
      sum_sq[k] += n_g * n_g;
    }
  }
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double mean = sum[k] / n_traj;
    const double var = std::max(0.0, (sum_sq[k] - n_traj * mean * mean) / (n_traj - 1.0));
    out.mean[k] = mean;
    out.stderr_mean[k] = std::sqrt(var / n_traj);
  }
  return out;
}

TrajectoryEnsemble run_ensemble(std::span<const double> rates, std::int64_t n_trajectories,
                                std::uint64_t seed, std::vector<double> t_grid,
                                std::size_t threads) {
  require_positive_rates(rates);
  if (n_trajectories < 2) {
    throw DomainError("an ensemble needs at least two trajectories");
  }
  TrajectoryEnsemble out;
  out.n_pairs = static_cast<std::int64_t>(rates.size());
  out.seed = seed;
  out.jump_times.resize(static_cast<std::size_t>(n_trajectories));
  parallel_for(out.jump_times.size(), threads, [&](std::size_t j) {
    out.jump_times[j] = sample_trajectory(rates, trajectory_seed(seed, j));
  });
  out.t_grid = std::move(t_grid);
  auto stats = ensemble_stats(out.jump_times, out.n_pairs, out.t_grid);
  out.mean_NG = std::move(stats.mean);
  out.stderr_NG = std::move(stats.stderr_mean);
  return out;
}

std::vector<double> exact_mean_ground_count(std::span<const double> rates,
                                            std::span<const double> t_grid) {
  const auto n = static_cast<Eigen::Index>(rates.size());
  if (n > kExactMeanMaxPairs) {
    throw DimensionError("exact mean limited to 512 pairs");
  }
  // State index = number of ground-state pairs M (0..N).
  Eigen::MatrixXd generator = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (Eigen::Index m = 1; m <= n; ++m) {
    const double r = rates[static_cast<std::size_t>(m - 1)];
    generator(m, m) = -r;
    generator(m - 1, m) = r;
  }
  Eigen::VectorXd prob = Eigen::VectorXd::Zero(n + 1);
  prob(n) = 1.0;
  const Eigen::VectorXd counts = Eigen::VectorXd::LinSpaced(n + 1, 0.0, static_cast<double>(n));
  std::vector<double> mean;
  mean.reserve(t_grid.size());
  double t_prev = 0.0;
  for (const double t : t_grid) {
    if (t < t_prev) throw DomainError("time grid must be non-decreasing");
    if (t > t_prev) {
      const Eigen::MatrixXd step = (generator * (t - t_prev)).exp();
      prob = step * prob;
      t_prev = t;
    }
    mean.push_back(counts.dot(prob));
  }
  return mean;
}

std::vector<double> log_grid(double t_min, double t_max, std::size_t count) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || count == 0) {
    throw DomainError("log grid needs 0 < t_min <= t_max and count >= 1");
  }
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = t_min;
    return grid;
  }
  const double lo = std::log10(t_min);
  const double step = (std::log10(t_max) - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = std::pow(10.0, lo + step * static_cast<double>(i));
  grid.back() = t_max;
  return grid;
}

std::vector<double> default_time_grid() { return log_grid(1e2, 1e9, 200); }

double crossing_time(std::span<const double> t_grid, std::span<const double> mean, double level) {
  for (std::size_t i = 0; i < mean.size(); ++i) {
    if (mean[i] > level) continue;
    if (i == 0) return t_grid[0];
    const double frac = (mean[i - 1] - level) / (mean[i - 1] - mean[i]);
    const double lt0 = std::log(t_grid[i - 1]);
    const double lt1 = std::log(t_grid[i]);
    return std::exp(lt0 + frac * (lt1 - lt0));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double log_slope_at_level(std::span<const double> t_grid, std::span<const double> mean,
                          double level) {
  for (std::size_t i = 0; i < mean.size(); ++i) {
    if (mean[i] > level) continue;
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = std::min(i + 1, mean.size() - 1);
    if (hi == lo || mean[lo] <= 0.0 || mean[hi] <= 0.0) break;
    return (std::log(mean[hi]) - std::log(mean[lo])) / (t_grid[hi] - t_grid[lo]);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace cavity_et
