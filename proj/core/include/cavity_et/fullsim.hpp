#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cavity_et/model.hpp"
#include "cavity_et/random.hpp"

namespace cavity_et {

/// Largest N accepted by the full simulation.
inline constexpr std::int64_t kFullSimMaxPairs = 12;

/// Kind of a Lindblad operator; each acts with rate `rate` as
/// rate * (L rho L^dag - {L^dag L, rho} / 2) with L the bare operator.
enum class JumpKind {
  CavityDecay,          ///< a (kappa)
  CavityPump,           ///< a^dag with a^dag|1> = 0 (kappa_+)
  PairDecay,            ///< |G><D|_n (Gamma)
  PairPump,             ///< |D><G|_n (Gamma_+)
  AcceptorRelaxation,   ///< |F><A|_n (eta); the pair leaves the active set
};

struct JumpChannel {
  JumpKind kind = JumpKind::CavityDecay;
  int pair = -1;  ///< position in the active-pair list, -1 for cavity channels
  double rate = 0.0;
};

/// The 2 + 3m jump operators acting on m active pairs.
std::vector<JumpChannel> build_lindblad_set(const ModelParams& params, int active_pairs);

/// Trajectory wavefunction. H_NH and every jump operator conserve or shift the
/// excitation number N_e = N_D + N_A + a^dag a by a definite amount, so the
/// state always lives in one excitation sector; only that sector's amplitudes
/// are stored. The full basis has one base-3 digit per active pair
/// (G = 0, D = 1, A = 2, pair k at 3^k) and the photon number at 3^m.
struct FullState {
  int excitations = 0;             ///< N_e of the sector
  std::vector<int> active_pairs;   ///< original labels of pairs not yet in |F>
  Eigen::VectorXcd amplitudes;     ///< sector-local amplitudes (not renormalized between jumps)
  double t = 0.0;

  int active_count() const { return static_cast<int>(active_pairs.size()); }
  double norm() const { return amplitudes.squaredNorm(); }
  /// Dimension of the full 3-level x photon space: 2 * 3^m.
  std::size_t dimension() const;
};

/// Per-trajectory observables on a time grid. N_G and N_e are norm-corrected
/// expectation values; N_F counts pairs lost to |F>.
struct FullTrajectoryRecord {
  std::vector<double> n_ground;
  std::vector<double> n_excited;
  std::vector<double> n_final;
  std::int64_t jumps = 0;
};

struct FullSimEnsemble {
  std::vector<double> t_grid;
  std::vector<double> mean_NG, stderr_NG;
  std::vector<double> mean_Ne;
  std::vector<double> mean_NF, stderr_NF;
  std::int64_t n_trajectories = 0;
};

/// Ground-state escape time T = -ln(p) / (kappa_+ + M Gamma_+).
/// Throws StalledProcessError if both pumps vanish.
double ground_state_wait(const ModelParams& params, std::int64_t active_pairs, double p);

/// Quantum-trajectory simulation of the full master equation for N <= 12 pairs
/// with at most one cavity photon.
///
/// Sector propagators: sectors of dimension <= kDenseSectorLimit use exact
/// matrix exponentials exp(-i H h 2^j) with h = dt/64 (dt = 0.01/kappa), so jump
/// times are resolved to h without integration error; larger sectors use RK4
/// with step dt and RK4 sub-steps of h to resolve the threshold crossing.
/// Sectors are built lazily and cached; a simulator may be shared by threads.
class FullSimulator {
 public:
  static constexpr int kDenseSectorLimit = 256;
  static constexpr int kLadderLevels = 14;  ///< strides h, 2h, ..., 2^13 h

  /// `step` overrides the default dt = 0.01 / kappa.
  explicit FullSimulator(const ModelParams& params, std::optional<double> step = {});
  ~FullSimulator();
  FullSimulator(const FullSimulator&) = delete;
  FullSimulator& operator=(const FullSimulator&) = delete;

  const ModelParams& params() const { return params_; }
  double step() const { return dt_; }
  double fine_step() const { return dt_ / 64.0; }

  /// All pairs in |G>, no photon.
  FullState initial_state() const;

  /// Basis state of the full space (see FullState for the encoding).
  FullState basis_state(int active_pairs, std::int64_t full_index) const;

  /// Dense vector over the full 2 * 3^m basis.
  Eigen::VectorXcd to_full(const FullState& state) const;

  /// exp(-i H_NH dt) applied to the state (no renormalization).
  void evolve_nonhermitian(FullState& state, double dt) const;

  /// Jump probabilities <L^dag L> / sum, one per channel of build_lindblad_set.
  std::vector<double> jump_weights(const FullState& state) const;

  /// L |psi> (unnormalized; may be the zero vector).
  FullState apply_jump(const FullState& state, const JumpChannel& channel) const;

  /// Draws a channel with probability proportional to its weight, applies it and
  /// renormalizes. Returns the index of the chosen channel.
  std::size_t select_and_apply_jump(FullState& state, Rng& rng) const;

  /// Norm-corrected <N_G> of the state.
  double ground_population(const FullState& state) const;

  FullTrajectoryRecord run_trajectory(std::span<const double> t_grid, std::uint64_t seed) const;

  FullSimEnsemble run_ensemble(std::vector<double> t_grid, std::int64_t n_trajectories,
                               std::uint64_t seed, std::size_t threads = 1) const;

 private:
  struct Sector;
  struct PairLayout;

  const Sector& sector(int active_pairs, int excitations) const;
  const PairLayout& layout(int active_pairs) const;
  Sector build_sector(int active_pairs, int excitations) const;

  /// Advances towards t_stop; returns true if the norm would fall to `threshold`
  /// within the next fine step (state and time are then at the crossing).
  bool evolve_until(FullState& state, const Sector& sec, double t_stop, double threshold) const;

  ModelParams params_;
  double dt_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<int, int>, std::unique_ptr<Sector>> sectors_;
  mutable std::map<int, std::unique_ptr<PairLayout>> layouts_;
};

}  // namespace cavity_et
