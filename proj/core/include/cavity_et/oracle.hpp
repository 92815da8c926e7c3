#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "cavity_et/model.hpp"

namespace cavity_et {

/// Largest ground-state count accepted by the brute-force rate oracles.
inline constexpr std::int64_t kOracleMaxPairs = 8;

/// Single-excitation block of H_NH in the position basis
/// {|1_ph>, |D_1..D_M>, |A_1..A_M>} with pump sources and acceptor sinks.
struct ExcitedBlock {
  std::int64_t ground_count = 0;
  Eigen::MatrixXcd h_matrix;
  Eigen::VectorXd source_weights;  ///< kappa_+ on the photon, Gamma_+ on each donor
  Eigen::VectorXd sink_weights;    ///< eta on each acceptor
};

ExcitedBlock excited_block(const ModelParams& params, std::int64_t ground_count);

/// Transfer rate from an explicit (2M+1)^2 superoperator linear solve; no
/// eigendecomposition. 1 <= M <= kOracleMaxPairs.
double brute_force_rate(const ModelParams& params, std::int64_t ground_count);

/// The rate double sum evaluated with explicit position-space eigenstates of the
/// (2M+1)-dimensional block, split by state type (signs as in the rate, so the
/// real part of the sum of all three is the transfer rate). 2 <= M <= kOracleMaxPairs.
struct ChannelSums {
  std::complex<double> bright_bright;
  std::complex<double> bright_dark;  ///< both orderings of the cross terms
  std::complex<double> dark_dark;
};

ChannelSums explicit_channel_sums(const ModelParams& params, std::int64_t ground_count);

}  // namespace cavity_et
