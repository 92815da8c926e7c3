#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "cavity_et/rates.hpp"

namespace cavity_et::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      ///< worst observed error measure
  double tolerance = 0.0;  ///< bound the measure was compared against
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool passed() const;
};

struct ValidationOptions {
  PropagatorFn propagator = cavity_et::propagator;  ///< used by the closed-form side only
  std::uint64_t seed = 20240101;
  int oracle_sets = 20;    ///< random parameter sets per ground count
  int eigen_draws = 1000;  ///< random draws for the eigen-quality suites
  std::optional<ModelParams> config;  ///< extra checks at a user configuration
};

/// Random parameters: rates log-uniform in [1e-4, 1], detuning and tunneling
/// uniform in [-0.5, 0.5].
ModelParams random_parameters(std::mt19937_64& rng, std::int64_t n_pairs);

/// Eigen residual max_k |A v_k - E_k v_k| / |A| over both blocks.
CheckResult check_eigen_residuals(const ValidationOptions& options);
/// max |W R - I|, |R W - I| over both blocks.
CheckResult check_biorthogonality(const ValidationOptions& options);
/// Closed-form r_tot against the superoperator oracle, M = 1..4.
CheckResult check_oracle_equivalence(const ValidationOptions& options);
/// Bright-dark cross terms relative to r_tot, M = 2..6.
CheckResult check_cross_terms(const ValidationOptions& options);
/// Closed-form dark channel against the explicit position-space sum, M = 2..6.
CheckResult check_dark_reduction(const ValidationOptions& options);
/// r_tot = r_cav + r_ind, r_cav linear in kappa_+, r_ind linear in Gamma_+, r_bare linear in M.
CheckResult check_linearity(const ValidationOptions& options);

/// Runs every suite (and, with a config, the oracle and identity checks at that
/// point). Exceptional points at the config propagate as ExceptionalPointError.
ValidationReport run_validation(const ValidationOptions& options);

void print_report(std::ostream& out, const ValidationReport& report);

}  // namespace cavity_et::cli
