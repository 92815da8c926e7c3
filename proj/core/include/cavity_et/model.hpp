#pragma once

#include <complex>
#include <cstdint>

#include "cavity_et/errors.hpp"

namespace cavity_et {

using cplx = std::complex<double>;

/// Physical parameters of N donor-acceptor pairs coupled to a lossy cavity.
///
/// Every rate and energy is expressed in units of a reference rate kappa_0
/// (typically the cavity decay itself); times are in 1/kappa_0.
struct ModelParams {
  double coupling = 0.0;             ///< single-pair cavity coupling g
  double cavity_decay = 1.0;         ///< kappa, must be > 0
  double cavity_pump = 0.0;          ///< incoherent cavity pump kappa_+
  double pair_decay = 0.0;           ///< single-pair decay Gamma (D -> G)
  double pair_pump = 0.0;            ///< single-pair pump Gamma_+ (G -> D)
  double acceptor_relaxation = 1.0;  ///< eta (A -> F), must be > 0
  double detuning = 0.0;             ///< Delta = E_A - E_D, may be negative
  double tunneling = 0.0;            ///< donor-acceptor tunneling V, may be negative
  std::int64_t n_pairs = 1;          ///< total number of pairs N

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Returns `params` unchanged if all invariants hold; throws ConfigError naming
/// the offending field otherwise. The field names are the parameter-file keys.
ModelParams validate(const ModelParams& params);

/// Collective coupling g * sqrt(M) of the symmetric matter mode at M ground-state pairs.
double collective_coupling(const ModelParams& params, std::int64_t ground_count);

/// Single-pair coupling that yields collective coupling `g_c` at `ground_count` pairs.
double coupling_for_collective(double g_c, std::int64_t ground_count);

/// Parameters of the fig. 1(e) operating point (kappa = 1, N = 1e4, g_c = 0.2).
ModelParams reference_params();

}  // namespace cavity_et
