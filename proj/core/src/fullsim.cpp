#include "cavity_et/fullsim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <unsupported/Eigen/MatrixFunctions>

#include "cavity_et/parallel.hpp"

namespace cavity_et {

namespace {

constexpr double kNormUnderflow = 1e-300;
constexpr std::uint8_t kG = 0;
constexpr std::uint8_t kD = 1;
constexpr std::uint8_t kA = 2;

std::int64_t pow3(int k) {
  std::int64_t r = 1;
  for (int i = 0; i < k; ++i) r *= 3;
  return r;
}

int digit(std::int64_t index, std::int64_t place) { return static_cast<int>((index / place) % 3); }

void check_norm(double norm) {
  if (!(norm >= kNormUnderflow)) {
    throw TrajectoryError("state norm underflow below 1e-300 during non-Hermitian evolution");
  }
}

}  // namespace

struct FullSimulator::PairLayout {
  int m = 0;
  std::vector<std::int32_t> local_index;  // by full index, within its own sector
  std::vector<std::int8_t> excitations;   // N_e of each full basis state
};

struct FullSimulator::Sector {
  int m = 0;
  int e = 0;
  std::vector<std::int64_t> states;      // full index per local index
  std::vector<double> pair_excitations;  // number of pairs in D or A
  Eigen::SparseMatrix<cplx, Eigen::RowMajor> generator;  // -i H_NH
  std::vector<Eigen::MatrixXcd> ladder;  // exp(-i H_NH h 2^j); empty for RK4 sectors

  Eigen::Index dim() const { return static_cast<Eigen::Index>(states.size()); }
  bool dense() const { return !ladder.empty(); }

  Eigen::VectorXcd rk4(const Eigen::VectorXcd& x, double s) const {
    const Eigen::VectorXcd k1 = generator * x;
    const Eigen::VectorXcd k2 = generator * (x + 0.5 * s * k1);
    const Eigen::VectorXcd k3 = generator * (x + 0.5 * s * k2);
    const Eigen::VectorXcd k4 = generator * (x + s * k3);
    return x + (s / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
};

std::vector<JumpChannel> build_lindblad_set(const ModelParams& p, int active_pairs) {
  std::vector<JumpChannel> set;
  set.reserve(static_cast<std::size_t>(2 + 3 * active_pairs));
  set.push_back({JumpKind::CavityDecay, -1, p.cavity_decay});
  set.push_back({JumpKind::CavityPump, -1, p.cavity_pump});
  for (int n = 0; n < active_pairs; ++n) {
    set.push_back({JumpKind::PairDecay, n, p.pair_decay});
    set.push_back({JumpKind::PairPump, n, p.pair_pump});
    set.push_back({JumpKind::AcceptorRelaxation, n, p.acceptor_relaxation});
  }
  return set;
}

std::size_t FullState::dimension() const {
  return static_cast<std::size_t>(2 * pow3(active_count()));
}

double ground_state_wait(const ModelParams& params, std::int64_t active_pairs, double p) {
  const double escape = params.cavity_pump + static_cast<double>(active_pairs) * params.pair_pump;
  if (!(escape > 0.0)) {
    throw StalledProcessError("ground state cannot be left: kappa_+ and Gamma_+ vanish",
                              static_cast<long long>(active_pairs));
  }
  if (!(p > 0.0 && p <= 1.0)) {
    throw DomainError("ground_state_wait needs p in (0, 1]");
  }
  return -std::log(p) / escape;
}

FullSimulator::FullSimulator(const ModelParams& params, std::optional<double> step)
    : params_(validate(params)), dt_(step.value_or(0.01 / params.cavity_decay)) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw DomainError("time step must be positive");
  if (params_.n_pairs > kFullSimMaxPairs) {
    std::ostringstream msg;
    msg << "full simulation supports at most " << kFullSimMaxPairs << " pairs, got "
        << params_.n_pairs;
    throw DimensionError(msg.str());
  }
}

FullSimulator::~FullSimulator() = default;

const FullSimulator::PairLayout& FullSimulator::layout(int m) const {
  std::lock_guard lock(cache_mutex_);
  auto& slot = layouts_[m];
  if (!slot) {
    auto lay = std::make_unique<PairLayout>();
    lay->m = m;
    const std::int64_t pairs_dim = pow3(m);
    const std::int64_t full_dim = 2 * pairs_dim;
    lay->local_index.resize(static_cast<std::size_t>(full_dim));
    lay->excitations.resize(static_cast<std::size_t>(full_dim));
    std::vector<std::int32_t> counter(static_cast<std::size_t>(m) + 2, 0);
    for (std::int64_t s = 0; s < full_dim; ++s) {
      int e = static_cast<int>(s / pairs_dim);
      for (std::int64_t place = 1; place < pairs_dim; place *= 3) e += digit(s, place) != kG;
      lay->excitations[static_cast<std::size_t>(s)] = static_cast<std::int8_t>(e);
      lay->local_index[static_cast<std::size_t>(s)] = counter[static_cast<std::size_t>(e)]++;
    }
    slot = std::move(lay);
  }
  return *slot;
}

FullSimulator::Sector FullSimulator::build_sector(int m, int e) const {
  const PairLayout& lay = layout(m);
  const std::int64_t pairs_dim = pow3(m);
  const cplx i_unit(0.0, 1.0);
  const ModelParams& p = params_;

  Sector sec;
  sec.m = m;
  sec.e = e;
  for (std::int64_t s = 0; s < 2 * pairs_dim; ++s)
    if (lay.excitations[static_cast<std::size_t>(s)] == e) sec.states.push_back(s);

  std::vector<Eigen::Triplet<cplx>> entries;
  for (Eigen::Index row = 0; row < sec.dim(); ++row) {
    const std::int64_t s = sec.states[static_cast<std::size_t>(row)];
    const bool photon = s >= pairs_dim;
    cplx diag = photon ? -0.5 * i_unit * p.cavity_decay : -0.5 * i_unit * p.cavity_pump;
    int excited_pairs = 0;
    auto add = [&](std::int64_t target, double value) {
      const auto col = lay.local_index[static_cast<std::size_t>(target)];
      entries.emplace_back(row, col, -i_unit * value);
    };
    for (int k = 0; k < m; ++k) {
      const std::int64_t place = pow3(k);
      switch (digit(s, place)) {
        case kG:
          diag += -0.5 * i_unit * p.pair_pump;
          if (photon && p.coupling != 0.0) add(s - pairs_dim + place, p.coupling);
          break;
        case kD:
          ++excited_pairs;
          diag += -0.5 * i_unit * p.pair_decay;
          if (!photon && p.coupling != 0.0) add(s + pairs_dim - place, p.coupling);
          if (p.tunneling != 0.0) add(s + place, p.tunneling);
          break;
        default:
          ++excited_pairs;
          diag += p.detuning - 0.5 * i_unit * p.acceptor_relaxation;
          if (p.tunneling != 0.0) add(s - place, p.tunneling);
          break;
      }
    }
    entries.emplace_back(row, row, -i_unit * diag);
    sec.pair_excitations.push_back(excited_pairs);
  }
  sec.generator.resize(sec.dim(), sec.dim());
  sec.generator.setFromTriplets(entries.begin(), entries.end());

  if (sec.dim() > 0 && sec.dim() <= kDenseSectorLimit) {
    const Eigen::MatrixXcd a = Eigen::MatrixXcd(sec.generator) * fine_step();
    sec.ladder.reserve(kLadderLevels);
    // Each level is exponentiated directly; repeated squaring would compound roundoff.
    for (int j = 0; j < kLadderLevels; ++j)
      sec.ladder.push_back(Eigen::MatrixXcd(a * std::ldexp(1.0, j)).exp());
  }
  return sec;
}

const FullSimulator::Sector& FullSimulator::sector(int m, int e) const {
  {
    std::lock_guard lock(cache_mutex_);
    auto it = sectors_.find({m, e});
    if (it != sectors_.end()) return *it->second;
  }
  auto built = std::make_unique<Sector>(build_sector(m, e));
  std::lock_guard lock(cache_mutex_);
  auto& slot = sectors_[{m, e}];
  if (!slot) slot = std::move(built);
  return *slot;
}

FullState FullSimulator::initial_state() const {
  return basis_state(static_cast<int>(params_.n_pairs), 0);
}

FullState FullSimulator::basis_state(int m, std::int64_t full_index) const {
  if (m < 0 || m > params_.n_pairs) throw DomainError("active pair count out of range");
  const PairLayout& lay = layout(m);
  if (full_index < 0 || full_index >= static_cast<std::int64_t>(lay.local_index.size())) {
    throw DomainError("basis index out of range");
  }
  FullState st;
  st.excitations = lay.excitations[static_cast<std::size_t>(full_index)];
  st.active_pairs.resize(static_cast<std::size_t>(m));
  for (int n = 0; n < m; ++n) st.active_pairs[static_cast<std::size_t>(n)] = n;
  const Sector& sec = sector(m, st.excitations);
  st.amplitudes = Eigen::VectorXcd::Zero(sec.dim());
  st.amplitudes(lay.local_index[static_cast<std::size_t>(full_index)]) = 1.0;
  return st;
}

Eigen::VectorXcd FullSimulator::to_full(const FullState& state) const {
  const Sector& sec = sector(state.active_count(), state.excitations);
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(state.dimension()));
  for (Eigen::Index i = 0; i < sec.dim(); ++i) full(sec.states[static_cast<std::size_t>(i)]) = state.amplitudes(i);
  return full;
}

void FullSimulator::evolve_nonhermitian(FullState& state, double dt) const {
  if (!(dt > 0.0)) throw DomainError("evolution step must be positive");
  const Sector& sec = sector(state.active_count(), state.excitations);
  if (sec.dim() == 0) return;
  if (sec.dense()) {
    const double h = fine_step();
    auto n = static_cast<std::int64_t>(std::floor(dt / h));
    const double rest = dt - static_cast<double>(n) * h;
    const std::int64_t top = std::int64_t{1} << (kLadderLevels - 1);
    for (; n >= top; n -= top) state.amplitudes = sec.ladder.back() * state.amplitudes;
    for (int j = 0; j < kLadderLevels; ++j)
      if ((n >> j) & 1) state.amplitudes = sec.ladder[static_cast<std::size_t>(j)] * state.amplitudes;
    if (rest > 1e-12 * h) {
      const Eigen::MatrixXcd a = Eigen::MatrixXcd(sec.generator) * rest;
      state.amplitudes = a.exp() * state.amplitudes;
    }
  } else {
    auto n = static_cast<std::int64_t>(std::floor(dt / dt_));
    const double rest = dt - static_cast<double>(n) * dt_;
    for (std::int64_t k = 0; k < n; ++k) state.amplitudes = sec.rk4(state.amplitudes, dt_);
    if (rest > 1e-12 * dt_) state.amplitudes = sec.rk4(state.amplitudes, rest);
  }
  state.t += dt;
  check_norm(state.norm());
}

bool FullSimulator::evolve_until(FullState& state, const Sector& sec, double t_stop,
                                 double threshold) const {
  const double h = fine_step();
  const double slack = 1e-12 * std::max(1.0, std::abs(t_stop));
  Eigen::VectorXcd candidate(sec.dim());
  if (sec.dense()) {
    for (int j = kLadderLevels - 1; j >= 0; --j) {
      const double stride = std::ldexp(h, j);
      const auto& prop = sec.ladder[static_cast<std::size_t>(j)];
      while (state.t + stride <= t_stop + slack) {
        candidate.noalias() = prop * state.amplitudes;
        if (candidate.squaredNorm() <= threshold) break;
        state.amplitudes.swap(candidate);
        state.t += stride;
      }
    }
    if (state.t + h <= t_stop + slack) {
      state.amplitudes = sec.ladder.front() * state.amplitudes;
      state.t += h;
      check_norm(state.norm());
      return true;
    }
    return false;
  }
  while (state.t + dt_ <= t_stop + slack) {
    candidate = sec.rk4(state.amplitudes, dt_);
    if (candidate.squaredNorm() <= threshold) break;
    state.amplitudes.swap(candidate);
    state.t += dt_;
  }
  while (state.t + h <= t_stop + slack) {
    state.amplitudes = sec.rk4(state.amplitudes, h);
    state.t += h;
    if (state.norm() <= threshold) {
      check_norm(state.norm());
      return true;
    }
  }
  check_norm(state.norm());
  return false;
}

std::vector<double> FullSimulator::jump_weights(const FullState& state) const {
  const int m = state.active_count();
  const Sector& sec = sector(m, state.excitations);
  const std::int64_t pairs_dim = pow3(m);
  const auto channels = build_lindblad_set(params_, m);
  std::vector<double> photon_pop(2, 0.0);
  std::vector<std::array<double, 3>> pair_pop(static_cast<std::size_t>(m), {0.0, 0.0, 0.0});
  for (Eigen::Index i = 0; i < sec.dim(); ++i) {
    const double w = std::norm(state.amplitudes(i));
    const std::int64_t s = sec.states[static_cast<std::size_t>(i)];
    photon_pop[s >= pairs_dim ? 1 : 0] += w;
    for (int k = 0; k < m; ++k) pair_pop[static_cast<std::size_t>(k)][static_cast<std::size_t>(digit(s, pow3(k)))] += w;
  }
  std::vector<double> weights;
  weights.reserve(channels.size());
  double total = 0.0;
  for (const auto& ch : channels) {
    double pop = 0.0;
    switch (ch.kind) {
      case JumpKind::CavityDecay: pop = photon_pop[1]; break;
      case JumpKind::CavityPump: pop = photon_pop[0]; break;
      case JumpKind::PairDecay: pop = pair_pop[static_cast<std::size_t>(ch.pair)][kD]; break;
      case JumpKind::PairPump: pop = pair_pop[static_cast<std::size_t>(ch.pair)][kG]; break;
      case JumpKind::AcceptorRelaxation: pop = pair_pop[static_cast<std::size_t>(ch.pair)][kA]; break;
    }
    weights.push_back(ch.rate * pop);
    total += weights.back();
  }
  if (total > 0.0)
    for (auto& w : weights) w /= total;
  return weights;
}

FullState FullSimulator::apply_jump(const FullState& state, const JumpChannel& ch) const {
  const int m = state.active_count();
  const Sector& sec = sector(m, state.excitations);
  const std::int64_t pairs_dim = pow3(m);
  const double amp = std::sqrt(ch.rate);

  FullState out;
  out.t = state.t;
  out.active_pairs = state.active_pairs;
  int target_m = m;
  switch (ch.kind) {
    case JumpKind::CavityDecay:
    case JumpKind::PairDecay: out.excitations = state.excitations - 1; break;
    case JumpKind::CavityPump:
    case JumpKind::PairPump: out.excitations = state.excitations + 1; break;
    case JumpKind::AcceptorRelaxation:
      out.excitations = state.excitations - 1;
      target_m = m - 1;
      out.active_pairs.erase(out.active_pairs.begin() + ch.pair);
      break;
  }
  if (out.excitations < 0) {
    out.excitations = 0;  // the operator annihilates every component
    out.amplitudes = Eigen::VectorXcd::Zero(sector(target_m, 0).dim());
    return out;
  }
  const PairLayout& target_layout = layout(target_m);
  const Sector& target = sector(target_m, out.excitations);
  out.amplitudes = Eigen::VectorXcd::Zero(target.dim());
  const std::int64_t place = ch.pair >= 0 ? pow3(ch.pair) : 0;

  for (Eigen::Index i = 0; i < sec.dim(); ++i) {
    const std::int64_t s = sec.states[static_cast<std::size_t>(i)];
    const bool photon = s >= pairs_dim;
    std::int64_t dest = -1;
    switch (ch.kind) {
      case JumpKind::CavityDecay: if (photon) dest = s - pairs_dim; break;
      case JumpKind::CavityPump: if (!photon) dest = s + pairs_dim; break;
      case JumpKind::PairDecay: if (digit(s, place) == kD) dest = s - place; break;
      case JumpKind::PairPump: if (digit(s, place) == kG) dest = s + place; break;
      case JumpKind::AcceptorRelaxation:
        if (digit(s, place) == kA) dest = s % place + (s / (3 * place)) * place;
        break;
    }
    if (dest < 0) continue;
    out.amplitudes(target_layout.local_index[static_cast<std::size_t>(dest)]) +=
        amp * state.amplitudes(i);
  }
  return out;
}

std::size_t FullSimulator::select_and_apply_jump(FullState& state, Rng& rng) const {
  const auto weights = jump_weights(state);
  double total = 0.0;
  for (const double w : weights) total += w;
  if (!(total > 0.0)) throw TrajectoryError("no jump channel has nonzero weight");
  const double u = open_unit(rng) * total;
  std::size_t chosen = weights.size();
  std::size_t last_nonzero = 0;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_nonzero = i;
    cumulative += weights[i];
    if (u < cumulative) {
      chosen = i;
      break;
    }
  }
  if (chosen == weights.size()) chosen = last_nonzero;  // rounding past the end
  const auto channels = build_lindblad_set(params_, state.active_count());
  FullState next = apply_jump(state, channels[chosen]);
  const double n = next.norm();
  if (!(n > 0.0)) throw TrajectoryError("selected jump annihilated the state");
  next.amplitudes /= std::sqrt(n);
  state = std::move(next);
  return chosen;
}

double FullSimulator::ground_population(const FullState& state) const {
  const Sector& sec = sector(state.active_count(), state.excitations);
  double weighted = 0.0;
  double norm = 0.0;
  for (Eigen::Index i = 0; i < sec.dim(); ++i) {
    const double w = std::norm(state.amplitudes(i));
    weighted += w * sec.pair_excitations[static_cast<std::size_t>(i)];
    norm += w;
  }
  return state.active_count() - weighted / norm;
}

FullTrajectoryRecord FullSimulator::run_trajectory(std::span<const double> t_grid,
                                                   std::uint64_t seed) const {
  Rng rng(seed);
  const auto n_total = static_cast<double>(params_.n_pairs);
  const std::size_t n_points = t_grid.size();
  FullTrajectoryRecord rec;
  rec.n_ground.resize(n_points);
  rec.n_excited.resize(n_points);
  rec.n_final.resize(n_points);

  FullState state = initial_state();
  std::size_t k = 0;
  auto record = [&](double n_g, double n_e, double n_f) {
    rec.n_ground[k] = n_g;
    rec.n_excited[k] = n_e;
    rec.n_final[k] = n_f;
    ++k;
  };

  while (k < n_points) {
    const int m = state.active_count();
    const double lost = n_total - m;
    if (m == 0) {
      // Only the cavity remains; its stationary occupation is kappa_+/(kappa + kappa_+).
      const double photon = params_.cavity_pump / (params_.cavity_decay + params_.cavity_pump);
      while (k < n_points) record(0.0, photon, n_total);
      break;
    }
    if (state.excitations == 0) {
      const double escape = params_.cavity_pump + m * params_.pair_pump;
      if (!(escape > 0.0)) {
        while (k < n_points) record(m, 0.0, lost);
        break;
      }
      const double t_jump = state.t + ground_state_wait(params_, m, open_unit(rng));
      while (k < n_points && t_grid[k] < t_jump) record(m, 0.0, lost);
      if (k == n_points) break;
      state.t = t_jump;
      select_and_apply_jump(state, rng);
      ++rec.jumps;
      continue;
    }
    const Sector& sec = sector(m, state.excitations);
    const double threshold = open_unit(rng);
    for (;;) {
      if (evolve_until(state, sec, t_grid[k], threshold)) {
        select_and_apply_jump(state, rng);
        ++rec.jumps;
        break;
      }
      record(ground_population(state), state.excitations, lost);
      if (k == n_points) break;
    }
  }
  return rec;
}

FullSimEnsemble FullSimulator::run_ensemble(std::vector<double> t_grid,
                                            std::int64_t n_trajectories, std::uint64_t seed,
                                            std::size_t threads) const {
  if (n_trajectories < 2) throw DomainError("an ensemble needs at least two trajectories");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] >= t_grid[i - 1])) throw DomainError("time grid must be non-decreasing");

  std::vector<FullTrajectoryRecord> records(static_cast<std::size_t>(n_trajectories));
  parallel_for(records.size(), threads, [&](std::size_t j) {
    records[j] = run_trajectory(t_grid, trajectory_seed(seed, j));
  });

  const std::size_t n_points = t_grid.size();
  const auto n = static_cast<double>(n_trajectories);
  FullSimEnsemble out;
  out.n_trajectories = n_trajectories;
  out.mean_NG.assign(n_points, 0.0);
  out.stderr_NG.assign(n_points, 0.0);
  out.mean_Ne.assign(n_points, 0.0);
  out.mean_NF.assign(n_points, 0.0);
  out.stderr_NF.assign(n_points, 0.0);
  for (std::size_t k = 0; k < n_points; ++k) {
    double sg = 0, sg2 = 0, se = 0, sf = 0, sf2 = 0;
    for (const auto& r : records) {
      sg += r.n_ground[k];
      sg2 += r.n_ground[k] * r.n_ground[k];
      se += r.n_excited[k];
      sf += r.n_final[k];
      sf2 += r.n_final[k] * r.n_final[k];
    }
    const double mg = sg / n;
    const double mf = sf / n;
    out.mean_NG[k] = mg;
    out.stderr_NG[k] = std::sqrt(std::max(0.0, (sg2 - n * mg * mg) / (n - 1.0)) / n);
    out.mean_Ne[k] = se / n;
    out.mean_NF[k] = mf;
    out.stderr_NF[k] = std::sqrt(std::max(0.0, (sf2 - n * mf * mf) / (n - 1.0)) / n);
  }
  out.t_grid = std::move(t_grid);
  return out;
}

}  // namespace cavity_et
