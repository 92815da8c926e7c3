#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cavity_et/overlaps.hpp"
#include "support.hpp"

using namespace cavity_et;

TEST(Overlaps, ZeroCouplingPhotonOverlaps) {
  ModelParams p = reference_params();
  p.coupling = 0.0;
  const auto b = bright_block(p, 100);
  const auto ov = bright_overlaps(b);
  for (int s = 0; s < 3; ++s) {
    const bool photon_like = std::abs(b.eig.right(0, s)) > 0.5;
    EXPECT_NEAR(std::abs(ov.c_ph[s]), photon_like ? 1.0 : 0.0, 1e-14);
  }
}

TEST(Overlaps, MatchGaussInversionAtReferencePoint) {
  const ModelParams p = reference_params();
  const auto b = bright_block(p, p.n_pairs);
  const auto ov = bright_overlaps(b);
  const Eigen::MatrixXcd inv = test::gauss_inverse(b.eig.right);
  const double root_m = std::sqrt(static_cast<double>(p.n_pairs));
  for (int s = 0; s < 3; ++s) {
    EXPECT_NEAR(std::abs(ov.c_ph[s] - inv(s, 0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(ov.ctilde_D0[s] - inv(s, 1) / root_m), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(ov.ctilde_A0[s] - inv(s, 2) / root_m), 0.0, 1e-12);
    EXPECT_EQ(ov.cbar_ph[s], b.eig.right(0, s));
  }
}

TEST(Overlaps, DarkMatchGaussInversion) {
  const ModelParams p = test::small_system_params();
  const auto d = dark_block(p);
  const auto ov = dark_overlaps(d, 8);
  const Eigen::MatrixXcd inv = test::gauss_inverse(d.eig.right);
  for (int f = 0; f < 2; ++f) {
    EXPECT_NEAR(std::abs(ov.ctilde_Dk[f] - inv(f, 0) / std::sqrt(8.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(ov.ctilde_Ak[f] - inv(f, 1) / std::sqrt(8.0)), 0.0, 1e-12);
  }
}

TEST(Overlaps, DarkDecoupledCase) {
  ModelParams p;
  p.pair_decay = 0.1;
  p.acceptor_relaxation = 0.3;
  p.detuning = -0.2;
  p.tunneling = 0.0;
  const auto d = dark_block(p);
  const auto ov = dark_overlaps(d, 9);
  // Family 0 is the donor-like state (real energy 0 > -0.2).
  EXPECT_NEAR(std::abs(ov.ctilde_Dk[0]), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(std::abs(ov.ctilde_Ak[0]), 0.0, 1e-15);
}

TEST(Overlaps, DarkSymmetricCase) {
  ModelParams p;
  p.pair_decay = p.acceptor_relaxation = 0.05;
  p.detuning = 0.0;
  p.tunneling = 0.2;
  const auto ov = dark_overlaps(dark_block(p), 2);
  for (int f = 0; f < 2; ++f) {
    EXPECT_NEAR(std::abs(ov.ctilde_Dk[f]), 0.5, 1e-14);
    EXPECT_NEAR(std::abs(ov.ctilde_Ak[f]), 0.5, 1e-14);
  }
}

TEST(Overlaps, DarkNeedsTwoPairs) {
  EXPECT_THROW(dark_overlaps(dark_block(reference_params()), 1), DomainError);
  const auto table = overlap_table(bright_block(reference_params(), 1), dark_block(reference_params()));
  EXPECT_FALSE(table.dark.has_value());
}

TEST(Overlaps, PhotonReconstruction) {
  // |1_ph> = sum_psi |psi> c^ph_psi restricted to the bright block.
  const ModelParams p = reference_params();
  const auto b = bright_block(p, 2000);
  const auto ov = bright_overlaps(b);
  Eigen::Vector3cd sum = Eigen::Vector3cd::Zero();
  for (int s = 0; s < 3; ++s) sum += b.eig.right.col(s) * ov.c_ph[s];
  EXPECT_LE((sum - Eigen::Vector3cd::UnitX()).norm(), 1e-12);
}

TEST(Overlaps, DonorPumpWeightCollapsesToZeroMomentum) {
  // sum_n conj(c^{D_n}_psi) c^{D_n}_phi = M conj(ctilde^{D_0}_psi) ctilde^{D_0}_phi,
  // checked against an explicit position-space inverse.
  std::mt19937_64 rng(3);
  for (std::int64_t m = 2; m <= 6; ++m) {
    const ModelParams p = test::random_params(rng);
    const auto b = bright_block(p, m);
    const auto ov = bright_overlaps(b);
    const auto d = dark_block(p);
    const auto n = 2 * m + 1;
    const double root_m = std::sqrt(static_cast<double>(m));
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(n, n);
    for (int s = 0; s < 3; ++s) {
      w(0, s) = b.eig.right(0, s);
      for (std::int64_t k = 0; k < m; ++k) {
        w(1 + k, s) = b.eig.right(1, s) / root_m;
        w(1 + m + k, s) = b.eig.right(2, s) / root_m;
      }
    }
    int col = 3;
    for (std::int64_t q = 1; q < m; ++q)
      for (int f = 0; f < 2; ++f, ++col)
        for (std::int64_t k = 0; k < m; ++k) {
          const cplx wave = std::polar(1.0 / root_m, 2.0 * std::numbers::pi * q * k / m);
          w(1 + k, col) = d.donor_amplitude(f) * wave;
          w(1 + m + k, col) = d.acceptor_amplitude(f) * wave;
        }
    const Eigen::MatrixXcd u = test::gauss_inverse(w);
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 3; ++c) {
        cplx explicit_sum = 0.0;
        for (std::int64_t k = 0; k < m; ++k) explicit_sum += std::conj(u(a, 1 + k)) * u(c, 1 + k);
        const cplx reduced = static_cast<double>(m) * std::conj(ov.ctilde_D0[a]) * ov.ctilde_D0[c];
        EXPECT_NEAR(std::abs(explicit_sum - reduced), 0.0, 1e-10 * std::max(1.0, std::abs(reduced)));
      }
  }
}
