#include "cavity_et/oracle.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace cavity_et {

namespace {

using Eigen::Index;

void check_count(std::int64_t m, std::int64_t min_m) {
  if (m < min_m || m > kOracleMaxPairs) {
    std::ostringstream msg;
    msg << "oracle supports " << min_m << " <= M <= " << kOracleMaxPairs << ", got " << m;
    throw DimensionError(msg.str());
  }
}

}  // namespace

ExcitedBlock excited_block(const ModelParams& p, std::int64_t m) {
  check_count(m, 1);
  const Index n = 2 * m + 1;
  const cplx i_unit(0.0, 1.0);
  ExcitedBlock blk;
  blk.ground_count = m;
  blk.h_matrix = Eigen::MatrixXcd::Zero(n, n);
  blk.source_weights = Eigen::VectorXd::Zero(n);
  blk.sink_weights = Eigen::VectorXd::Zero(n);
  blk.h_matrix(0, 0) = -0.5 * i_unit * p.cavity_decay;
  blk.source_weights(0) = p.cavity_pump;
  for (Index k = 0; k < m; ++k) {
    const Index d = 1 + k;
    const Index a = 1 + m + k;
    blk.h_matrix(0, d) = blk.h_matrix(d, 0) = p.coupling;
    blk.h_matrix(d, d) = -0.5 * i_unit * p.pair_decay;
    blk.h_matrix(a, a) = p.detuning - 0.5 * i_unit * p.acceptor_relaxation;
    blk.h_matrix(d, a) = blk.h_matrix(a, d) = p.tunneling;
    blk.source_weights(d) = p.pair_pump;
    blk.sink_weights(a) = p.acceptor_relaxation;
  }
  return blk;
}

double brute_force_rate(const ModelParams& p, std::int64_t m) {
  const ExcitedBlock blk = excited_block(p, m);
  const Index n = blk.h_matrix.rows();
  const cplx i_unit(0.0, 1.0);
  // Row-major vectorization X(a, b) -> a * n + b, so that
  // (-i H X + i X H^dag) = [-i (H (x) 1) + i (1 (x) conj(H))] vec(X).
  Eigen::MatrixXcd super = Eigen::MatrixXcd::Zero(n * n, n * n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      const Index row = a * n + b;
      for (Index c = 0; c < n; ++c) {
        super(row, c * n + b) += -i_unit * blk.h_matrix(a, c);
        super(row, a * n + c) += i_unit * std::conj(blk.h_matrix(b, c));
      }
    }
  }
  Eigen::VectorXcd source = Eigen::VectorXcd::Zero(n * n);
  for (Index a = 0; a < n; ++a) source(a * n + a) = blk.source_weights(a);

  const Eigen::FullPivLU<Eigen::MatrixXcd> lu(super);
  if (!lu.isInvertible()) {
    throw DomainError("excited-state superoperator is singular (non-decaying excited state)");
  }
  const Eigen::VectorXcd x = lu.solve(source);
  // x is minus the stationary excited-state response; the sink turns it into a rate.
  double rate = 0.0;
  for (Index a = 0; a < n; ++a) rate -= blk.sink_weights(a) * x(a * n + a).real();
  return rate;
}

ChannelSums explicit_channel_sums(const ModelParams& p, std::int64_t m) {
  check_count(m, 2);
  const auto md = static_cast<double>(m);
  const Index n = 2 * m + 1;
  const double root_m = std::sqrt(md);
  const cplx i_unit(0.0, 1.0);

  // Bright states from the symmetric-mode 3x3 block.
  Eigen::Matrix3cd bright;
  bright << -0.5 * i_unit * p.cavity_decay, p.coupling * root_m, 0.0,
      p.coupling * root_m, -0.5 * i_unit * p.pair_decay, p.tunneling,
      0.0, p.tunneling, p.detuning - 0.5 * i_unit * p.acceptor_relaxation;
  const Eigen::ComplexEigenSolver<Eigen::Matrix3cd> bright_solver(bright);

  // Dark families from the single-pair 2x2 block.
  Eigen::Matrix2cd dark;
  dark << -0.5 * i_unit * p.pair_decay, p.tunneling,
      p.tunneling, p.detuning - 0.5 * i_unit * p.acceptor_relaxation;
  const Eigen::ComplexEigenSolver<Eigen::Matrix2cd> dark_solver(dark);

  Eigen::MatrixXcd states = Eigen::MatrixXcd::Zero(n, n);
  std::vector<cplx> energies;
  std::vector<bool> is_bright;
  Index col = 0;
  for (Index s = 0; s < 3; ++s, ++col) {
    const auto v = bright_solver.eigenvectors().col(s);
    states(0, col) = v(0);
    for (Index k = 0; k < m; ++k) {
      states(1 + k, col) = v(1) / root_m;
      states(1 + m + k, col) = v(2) / root_m;
    }
    energies.push_back(bright_solver.eigenvalues()(s));
    is_bright.push_back(true);
  }
  for (Index q = 1; q < m; ++q) {
    for (Index f = 0; f < 2; ++f, ++col) {
      const auto v = dark_solver.eigenvectors().col(f);
      for (Index k = 0; k < m; ++k) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(q * k) / md;
        const cplx wave = std::polar(1.0 / root_m, phase);
        states(1 + k, col) = v(0) * wave;
        states(1 + m + k, col) = v(1) * wave;
      }
      energies.push_back(dark_solver.eigenvalues()(f));
      is_bright.push_back(false);
    }
  }
  const Eigen::MatrixXcd bras = states.partialPivLu().inverse();

  ChannelSums sums{};
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      cplx pump = p.cavity_pump * std::conj(bras(a, 0)) * bras(b, 0);
      cplx sink = 0.0;
      for (Index k = 0; k < m; ++k) {
        pump += p.pair_pump * std::conj(bras(a, 1 + k)) * bras(b, 1 + k);
        sink += p.acceptor_relaxation * std::conj(states(1 + m + k, a)) * states(1 + m + k, b);
      }
      const cplx g = 1.0 / (i_unit * std::conj(energies[static_cast<std::size_t>(a)]) -
                            i_unit * energies[static_cast<std::size_t>(b)]);
      const cplx term = -pump * g * sink;
      const bool ba = is_bright[static_cast<std::size_t>(a)];
      const bool bb = is_bright[static_cast<std::size_t>(b)];
      if (ba && bb) {
        sums.bright_bright += term;
      } else if (!ba && !bb) {
        sums.dark_dark += term;
      } else {
        sums.bright_dark += term;
      }
    }
  }
  return sums;
}

}  // namespace cavity_et
