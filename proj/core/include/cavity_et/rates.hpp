#pragma once

#include <cstdint>
#include <vector>

#include "cavity_et/model.hpp"
#include "cavity_et/overlaps.hpp"
#include "cavity_et/spectra.hpp"

namespace cavity_et {

/// Instantaneous transfer rate at M ground-state pairs and its channels.
///
/// r_cav keeps only the cavity pump (Gamma_+ = 0), r_ind only the individual
/// pump (kappa_+ = 0), r_bare is the cavity-free reference (g = 0, kappa_+ = 0).
/// Entries that hit an exceptional point carry `exceptional = true` and NaN rates.
struct RateBreakdown {
  std::int64_t ground_count = 0;
  double r_tot = 0.0;
  double r_cav = 0.0;
  double r_ind = 0.0;
  double r_bare = 0.0;
  double imag_residual = 0.0;  ///< |Im| of the complex total before taking the real part
  bool exceptional = false;
};

using PropagatorFn = cplx (*)(cplx e_psi, cplx e_phi);

/// Excited-state propagator 1 / (i conj(E_psi) - i E_phi). Throws DomainError
/// if the denominator vanishes (non-decaying states).
cplx propagator(cplx e_psi, cplx e_phi);

/// Contribution of the nine bright-bright terms to the rate (sign included, so
/// the real part is the physical rate).
cplx bright_channel(const ModelParams& params, const BrightEigensystem& bright,
                    const BrightOverlaps& overlaps, PropagatorFn prop = propagator);

/// Contribution of all dark-dark terms, summed over the M - 1 quasi-momenta.
/// Zero for M = 1 (no dark states).
cplx dark_channel(const ModelParams& params, const DarkEigensystem& dark,
                  const OverlapTable& overlaps, PropagatorFn prop = propagator);

/// Full breakdown at M ground-state pairs (M >= 1). `params` must be validated.
RateBreakdown transfer_rate(const ModelParams& params, std::int64_t ground_count,
                            PropagatorFn prop = propagator);

/// Same, reusing a dark eigensystem solved once for `params`.
RateBreakdown transfer_rate(const ModelParams& params, std::int64_t ground_count,
                            const DarkEigensystem& dark, PropagatorFn prop = propagator);

/// Breakdowns for M = 1..n_pairs (entry i has M = i + 1). Exceptional points
/// are flagged in the entry instead of aborting the table.
std::vector<RateBreakdown> rate_table(const ModelParams& params, std::int64_t n_pairs,
                                      std::size_t threads = 1);

}  // namespace cavity_et
