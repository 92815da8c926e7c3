#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "cavity_et/dynamics.hpp"
#include "cavity_et/random.hpp"
#include "cavity_et/fullsim.hpp"
#include "cavity_et/lindblad_dense.hpp"
#include "support.hpp"

using namespace cavity_et;

namespace {

/// Independent dense H_NH on the full 2 * 3^m space (same digit encoding).
Eigen::MatrixXcd dense_nonhermitian(const ModelParams& p, int m) {
  const cplx i(0.0, 1.0);
  int pairs_dim = 1;
  for (int k = 0; k < m; ++k) pairs_dim *= 3;
  const int dim = 2 * pairs_dim;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int s = 0; s < dim; ++s) {
    const int photon = s / pairs_dim;
    h(s, s) += photon ? -0.5 * i * p.cavity_decay : -0.5 * i * p.cavity_pump;
    int place = 1;
    for (int k = 0; k < m; ++k, place *= 3) {
      const int level = (s / place) % 3;
      if (level == 0) {
        h(s, s) += -0.5 * i * p.pair_pump;
        if (photon) h(s - pairs_dim + place, s) += p.coupling;
      } else if (level == 1) {
        h(s, s) += -0.5 * i * p.pair_decay;
        if (!photon) h(s + pairs_dim - place, s) += p.coupling;
        h(s + place, s) += p.tunneling;
      } else {
        h(s, s) += p.detuning - 0.5 * i * p.acceptor_relaxation;
        h(s - place, s) += p.tunneling;
      }
    }
  }
  return h;
}

/// Dense H_NH restricted to the states with `excitations` quanta (photon plus
/// excited pairs); `states` receives the full indices in increasing order.
Eigen::MatrixXcd sector_nonhermitian(const ModelParams& p, int m, int excitations,
                                     std::vector<std::int64_t>& states) {
  std::int64_t pairs_dim = 1;
  for (int k = 0; k < m; ++k) pairs_dim *= 3;
  auto count = [&](std::int64_t s) {
    int e = s >= pairs_dim;
    for (std::int64_t place = 1; place < pairs_dim; place *= 3) e += (s / place) % 3 != 0;
    return e;
  };
  states.clear();
  for (std::int64_t s = 0; s < 2 * pairs_dim; ++s)
    if (count(s) == excitations) states.push_back(s);
  std::map<std::int64_t, int> local;
  for (std::size_t k = 0; k < states.size(); ++k) local[states[k]] = static_cast<int>(k);
  const cplx i(0.0, 1.0);
  const int dim = static_cast<int>(states.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int c = 0; c < dim; ++c) {
    const std::int64_t s = states[static_cast<std::size_t>(c)];
    const bool photon = s >= pairs_dim;
    h(c, c) += photon ? -0.5 * i * p.cavity_decay : -0.5 * i * p.cavity_pump;
    std::int64_t place = 1;
    for (int k = 0; k < m; ++k, place *= 3) {
      const int level = static_cast<int>((s / place) % 3);
      if (level == 0) {
        h(c, c) += -0.5 * i * p.pair_pump;
        if (photon) h(local.at(s - pairs_dim + place), c) += p.coupling;
      } else if (level == 1) {
        h(c, c) += -0.5 * i * p.pair_decay;
        if (!photon) h(local.at(s + pairs_dim - place), c) += p.coupling;
        h(local.at(s + place), c) += p.tunneling;
      } else {
        h(c, c) += p.detuning - 0.5 * i * p.acceptor_relaxation;
        h(local.at(s - place), c) += p.tunneling;
      }
    }
  }
  return h;
}

ModelParams single_pair_decay_only() {
  ModelParams p;
  p.n_pairs = 1;
  p.cavity_decay = 1.0;
  p.pair_decay = 0.3;
  p.acceptor_relaxation = 1.0;
  return p;
}

}  // namespace

TEST(FullSim, LindbladSetSizes) {
  const ModelParams p = test::small_system_params();
  EXPECT_EQ(build_lindblad_set(p, 1).size(), 5u);
  EXPECT_EQ(build_lindblad_set(p, 8).size(), 26u);
  const FullSimulator sim(p);
  EXPECT_EQ(sim.initial_state().dimension(), 13122u);
}

TEST(FullSim, DimensionGuard) {
  ModelParams p = test::small_system_params();
  p.n_pairs = 13;
  EXPECT_THROW(FullSimulator{p}, DimensionError);
}

TEST(FullSim, PhotonPumpTruncatedAtOne) {
  const ModelParams p = test::small_system_params();
  const FullSimulator sim(p);
  int pairs_dim = 1;
  for (int k = 0; k < 8; ++k) pairs_dim *= 3;
  const FullState one_photon = sim.basis_state(8, pairs_dim);  // all G, one photon
  const auto set = build_lindblad_set(p, 8);
  const FullState pumped = sim.apply_jump(one_photon, set[1]);
  EXPECT_EQ(pumped.norm(), 0.0);
}

TEST(FullSim, GroundStateWithoutDissipationIsStationary) {
  ModelParams p = test::small_system_params();
  p.cavity_pump = p.pair_pump = 0.0;
  const FullSimulator sim(p);
  FullState s = sim.initial_state();
  sim.evolve_nonhermitian(s, 123.4);
  EXPECT_EQ(s.amplitudes(0), cplx(1.0, 0.0));
}

TEST(FullSim, DonorDecaysExponentially) {
  const FullSimulator sim(single_pair_decay_only());
  FullState s = sim.basis_state(1, 1);  // pair in |D>, no photon
  for (double t : {0.37, 2.0, 10.0}) {
    FullState x = s;
    sim.evolve_nonhermitian(x, t);
    EXPECT_NEAR(x.norm(), std::exp(-0.3 * t), 1e-12 * std::exp(-0.3 * t));
  }
}

TEST(FullSim, MatchesDenseExponentialAtTwoPairs) {
  ModelParams p = test::small_system_params();
  p.n_pairs = 2;
  p.coupling = 0.2 / std::sqrt(2.0);
  const FullSimulator sim(p);
  const Eigen::MatrixXcd h = dense_nonhermitian(p, 2);
  ASSERT_EQ(h.rows(), 18);
  for (std::int64_t start : {0, 1, 5, 9, 12}) {
    FullState s = sim.basis_state(2, start);
    for (double t : {0.5, 3.7, 40.0}) {
      FullState x = s;
      sim.evolve_nonhermitian(x, t);
      const Eigen::MatrixXcd u = (Eigen::MatrixXcd(-cplx(0.0, 1.0) * h * t)).exp();
      const Eigen::VectorXcd ref = u.col(start);
      EXPECT_LT((sim.to_full(x) - ref).norm(), 1e-10) << "start " << start << " t " << t;
    }
  }
}

TEST(FullSim, RungeKuttaSectorsMatchDense) {
  // Three excitations on 7 pairs exceed the dense-sector limit and use RK4.
  ModelParams p = test::small_system_params();
  p.n_pairs = 7;
  p.coupling = 0.2 / std::sqrt(7.0);
  const FullSimulator sim(p);
  const std::int64_t start = 1 + 3 + 9;  // pairs 0..2 in |D>
  FullState x = sim.basis_state(7, start);
  ASSERT_GT(x.amplitudes.size(), FullSimulator::kDenseSectorLimit);
  sim.evolve_nonhermitian(x, 2.5);

  std::vector<std::int64_t> states;
  const Eigen::MatrixXcd h = sector_nonhermitian(p, 7, 3, states);
  ASSERT_EQ(static_cast<Eigen::Index>(states.size()), x.amplitudes.size());
  const Eigen::MatrixXcd gen = -cplx(0.0, 1.0) * h;
  const auto it = std::find(states.begin(), states.end(), start);
  const Eigen::VectorXcd e = Eigen::VectorXcd::Unit(h.rows(), it - states.begin());
  const Eigen::VectorXcd ref = (Eigen::MatrixXcd(gen * 2.5)).exp() * e;
  const Eigen::VectorXcd got = sim.to_full(x);
  double err = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k)
    err += std::norm(got(states[k]) - ref(static_cast<Eigen::Index>(k)));
  EXPECT_LT(std::sqrt(err), 1e-9);

  // Halving the RK4 step must reduce the error by about 2^4.
  auto rk4 = [&](Eigen::VectorXcd v, double step, int n) {
    for (int k = 0; k < n; ++k) {
      const Eigen::VectorXcd k1 = gen * v, k2 = gen * (v + 0.5 * step * k1),
                             k3 = gen * (v + 0.5 * step * k2), k4 = gen * (v + step * k3);
      v += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return v;
  };
  const Eigen::VectorXcd exact = (Eigen::MatrixXcd(gen * 0.8)).exp() * e;
  const double e1 = (rk4(e, 0.4, 2) - exact).norm();
  const double e2 = (rk4(e, 0.2, 4) - exact).norm();
  EXPECT_GT(std::log2(e1 / e2), 3.5);
}

TEST(FullSim, NormNonIncreasing) {
  const ModelParams p = test::small_system_params();
  const FullSimulator sim(p);
  FullState s = sim.basis_state(8, 1);
  double last = s.norm();
  for (int k = 0; k < 50; ++k) {
    sim.evolve_nonhermitian(s, 0.7);
    EXPECT_LE(s.norm(), last);
    last = s.norm();
  }
}

TEST(FullSim, GroundStateWait) {
  ModelParams p;
  p.cavity_pump = 0.01;
  p.pair_pump = 0.01;
  EXPECT_NEAR(ground_state_wait(p, 3, std::exp(-1.0)), 25.0, 1e-12);
  p.pair_pump = 0.0;
  EXPECT_NEAR(ground_state_wait(p, 1000, std::exp(-1.0)), 100.0, 1e-12);
  p.cavity_pump = 0.0;
  EXPECT_THROW(ground_state_wait(p, 3, 0.5), StalledProcessError);
}

TEST(FullSim, GroundStateWaitMean) {
  ModelParams p;
  p.cavity_pump = 0.01;
  p.pair_pump = 0.002;
  Rng rng(31);
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = ground_state_wait(p, 5, open_unit(rng));
    sum += t;
    sum_sq += t * t;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / (n - 1));
  EXPECT_LT(std::abs(mean - 50.0), 3.0 * se);
}

TEST(FullSim, DeterministicDecayJump) {
  const FullSimulator sim(single_pair_decay_only());
  FullState s = sim.basis_state(1, 1);
  Rng rng(1);
  const std::size_t ch = sim.select_and_apply_jump(s, rng);
  EXPECT_EQ(build_lindblad_set(sim.params(), 1)[ch].kind, JumpKind::PairDecay);
  EXPECT_EQ(s.excitations, 0);
  EXPECT_NEAR(std::abs(s.amplitudes(0)), 1.0, 1e-15);
}

TEST(FullSim, AcceptorRelaxationRemovesPair) {
  ModelParams p = test::small_system_params();
  p.n_pairs = 3;
  const FullSimulator sim(p);
  // Pair 1 in |A>, pair 2 in |D>, photon 0.
  FullState s = sim.basis_state(3, 2 * 3 + 1 * 9);
  const auto set = build_lindblad_set(p, 3);
  const JumpChannel eta_on_1 = set[2 + 3 * 1 + 2];
  ASSERT_EQ(eta_on_1.kind, JumpKind::AcceptorRelaxation);
  const FullState after = sim.apply_jump(s, eta_on_1);
  EXPECT_EQ(after.dimension() * 3, s.dimension());
  EXPECT_EQ(after.active_pairs, (std::vector<int>{0, 2}));
  const Eigen::VectorXcd full = sim.to_full(after);
  EXPECT_NEAR(std::abs(full(1 * 3)), std::sqrt(p.acceptor_relaxation), 1e-15);  // remaining pair 2 (now digit 1) in |D>
}

TEST(FullSim, JumpFrequenciesFollowWeights) {
  ModelParams p = test::small_system_params();
  p.n_pairs = 2;
  p.coupling = 0.3;
  p.pair_decay = 0.2;
  const FullSimulator sim(p);
  FullState s = sim.basis_state(2, 1);  // pair 0 in |D>
  sim.evolve_nonhermitian(s, 4.0);
  const auto w = sim.jump_weights(s);
  std::vector<int> counts(w.size(), 0);
  Rng rng(77);
  const int n = 40000;
  for (int k = 0; k < n; ++k) {
    FullState x = s;
    ++counts[sim.select_and_apply_jump(x, rng)];
  }
  for (std::size_t c = 0; c < w.size(); ++c) {
    const double f = double(counts[c]) / n;
    const double se = std::sqrt(std::max(w[c] * (1 - w[c]), 1e-12) / n);
    EXPECT_LT(std::abs(f - w[c]), 3.0 * se + 1e-12) << "channel " << c;
  }
}

TEST(FullSim, NoPumpKeepsAllPairs) {
  ModelParams p = test::small_system_params();
  p.cavity_pump = p.pair_pump = 0.0;
  const FullSimulator sim(p);
  const auto e = sim.run_ensemble(log_grid(1.0, 1e6, 20), 4, 1);
  for (double v : e.mean_NG) EXPECT_EQ(v, 8.0);
}

TEST(FullSim, PairCountConserved) {
  ModelParams p = test::small_system_params();
  p.n_pairs = 3;
  p.pair_pump = 1e-3;
  p.cavity_pump = 0.05;
  p.pair_decay = 1e-3;
  const FullSimulator sim(p);
  const auto grid = log_grid(1.0, 1e5, 25);
  const auto rec = sim.run_trajectory(grid, 3);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_LE(rec.n_ground[k] + rec.n_final[k], 3.0 + 1e-12);
    EXPECT_GE(rec.n_ground[k], 0.0);
    if (k) {
      EXPECT_GE(rec.n_final[k], rec.n_final[k - 1]);
    }
  }
}

TEST(FullSim, SinglePairMatchesDenseMasterEquation) {
  ModelParams p;
  p.n_pairs = 1;
  p.cavity_decay = 1.0;
  p.coupling = 0.2;
  p.cavity_pump = 0.05;
  p.pair_decay = 0.01;
  p.pair_pump = 0.02;
  p.detuning = 0.2;
  p.tunneling = 0.1;
  p.acceptor_relaxation = 0.05;
  const auto grid = log_grid(0.5, 300.0, 16);
  const FullSimulator sim(p);
  const int n_traj = 10000;
  const auto e = sim.run_ensemble(grid, n_traj, 2024);
  // Events rarer than ~1/n_traj are invisible to the ensemble, so the band has
  // a floor of a few counts.
  const double floor = 3.0 / n_traj;
  const auto dense = dense_lindblad_integrate(p, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_LT(std::abs(e.mean_NG[k] - dense.mean_NG[k]), 3.0 * e.stderr_NG[k] + floor)
        << "t = " << grid[k];
    EXPECT_LT(std::abs(e.mean_NF[k] - dense.mean_NF[k]), 3.0 * e.stderr_NF[k] + floor)
        << "t = " << grid[k];
  }
}

TEST(FullSim, TwoPairsMatchDenseMasterEquationAtStrongPumping) {
  // Small-system pumping with two pairs: the excited population is ~0.03, so the
  // ground-state operator sits visibly below N - N_F; both engines must agree on both.
  ModelParams p = test::small_system_params();
  p.n_pairs = 2;
  p.coupling = 0.2 / std::sqrt(2.0);
  p.pair_pump = (3e-7 / 6.0) * 4.0;
  const auto grid = log_grid(1e2, 1e6, 9);
  const int n_traj = 4000;
  const auto e = FullSimulator(p).run_ensemble(grid, n_traj, 99);
  const auto dense = dense_lindblad_integrate(p, grid);
  const double floor = 3.0 / n_traj;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_LT(std::abs(e.mean_NG[k] - dense.mean_NG[k]), 3.5 * e.stderr_NG[k] + floor)
        << "t = " << grid[k];
    EXPECT_LT(std::abs(e.mean_NF[k] - dense.mean_NF[k]), 3.5 * e.stderr_NF[k] + floor)
        << "t = " << grid[k];
    EXPECT_NEAR(e.mean_Ne[k], dense.mean_Ne[k], 0.004) << "t = " << grid[k];
  }
  EXPECT_GT(2.0 - dense.mean_NF[0] - dense.mean_NG[0], 0.01);
}
