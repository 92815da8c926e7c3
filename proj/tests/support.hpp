#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <utility>

#include <Eigen/Core>

#include "cavity_et/model.hpp"

namespace cavity_et::test {

/// Random parameter set: rates log-uniform in [1e-4, 1], detuning and tunneling
/// uniform in [-0.5, 0.5].
inline ModelParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> expo(-4.0, 0.0);
  std::uniform_real_distribution<double> sym(-0.5, 0.5);
  auto rate = [&] { return std::pow(10.0, expo(rng)); };
  ModelParams p;
  p.coupling = rate();
  p.cavity_decay = rate();
  p.cavity_pump = rate();
  p.pair_decay = rate();
  p.pair_pump = rate();
  p.acceptor_relaxation = rate();
  p.detuning = sym(rng);
  p.tunneling = sym(rng);
  p.n_pairs = 8;
  return p;
}

/// Gauss-Jordan inversion with partial pivoting, written independently of Eigen's LU.
inline Eigen::MatrixXcd gauss_inverse(Eigen::MatrixXcd a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXcd inv = Eigen::MatrixXcd::Identity(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index pivot = c;
    for (Eigen::Index r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(pivot, c))) pivot = r;
    a.row(c).swap(a.row(pivot));
    inv.row(c).swap(inv.row(pivot));
    const std::complex<double> d = a(c, c);
    a.row(c) /= d;
    inv.row(c) /= d;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == c) continue;
      const std::complex<double> f = a(r, c);
      a.row(r) -= f * a.row(c);
      inv.row(r) -= f * inv.row(c);
    }
  }
  return inv;
}

/// Parameters of the small-system validation run (N = 8, g_c = 0.2).
inline ModelParams small_system_params() {
  ModelParams p;
  p.n_pairs = 8;
  p.cavity_decay = 1.0;
  p.coupling = 0.2 / std::sqrt(8.0);
  p.cavity_pump = 1e-2;
  p.pair_decay = 3e-7;
  p.pair_pump = 3e-7 / 6.0;
  p.detuning = 0.2;
  p.tunneling = 0.1;
  p.acceptor_relaxation = 1e-2;
  return p;
}

}  // namespace cavity_et::test
