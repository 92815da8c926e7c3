#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cavity_et/model.hpp"

namespace cavity_et {

/// Largest N accepted by the dense master-equation reference.
inline constexpr std::int64_t kDenseLindbladMaxPairs = 3;

/// Populations of the full four-level master equation (photon truncated at one).
struct DensePopulations {
  std::vector<double> t_grid;
  std::vector<double> mean_NG;
  std::vector<double> mean_NF;
  std::vector<double> mean_Ne;
  double max_trace_error = 0.0;        ///< max |tr rho - 1| over the grid
  double max_hermiticity_error = 0.0;  ///< max |rho - rho^dag| entry over the grid
  double min_eigenvalue = 0.0;         ///< smallest eigenvalue of rho over the grid
  std::int64_t generator_dimension = 0;
};

/// Integrates the master equation from the all-ground, zero-photon state.
///
/// Only density-matrix entries between basis states with the same set of pairs
/// in |F> and the same excitation number can become nonzero; the generator is
/// built on that invariant subspace and propagated exactly with a matrix
/// exponential between consecutive grid points. Requires params.n_pairs <= 3.
DensePopulations dense_lindblad_integrate(const ModelParams& params,
                                          std::span<const double> t_grid);

}  // namespace cavity_et
