#include "cavity_et/model.hpp"

#include <cmath>
#include <string>

namespace cavity_et {

namespace {

void require_finite(double value, const char* field) {
  if (!std::isfinite(value)) {
    throw ConfigError(field, std::string("parameter '") + field + "' must be finite");
  }
}

void require_nonnegative(double value, const char* field) {
  require_finite(value, field);
  if (value < 0.0) {
    throw ConfigError(field, std::string("parameter '") + field + "' must be >= 0, got " +
                                 std::to_string(value));
  }
}

void require_positive(double value, const char* field) {
  require_finite(value, field);
  if (!(value > 0.0)) {
    throw ConfigError(field, std::string("parameter '") + field + "' must be > 0, got " +
                                 std::to_string(value));
  }
}

}  // namespace

ModelParams validate(const ModelParams& params) {
  require_nonnegative(params.coupling, "g");
  require_positive(params.cavity_decay, "kappa");
  require_nonnegative(params.cavity_pump, "kappa_plus");
  require_nonnegative(params.pair_decay, "gamma");
  require_nonnegative(params.pair_pump, "gamma_plus");
  // eta = 0 makes the transfer rate vanish identically.
  require_positive(params.acceptor_relaxation, "eta");
  require_finite(params.detuning, "delta");
  require_finite(params.tunneling, "V");
  if (params.n_pairs < 1) {
    throw ConfigError("N_total", "parameter 'N_total' must be >= 1, got " +
                                     std::to_string(params.n_pairs));
  }
  return params;
}

double collective_coupling(const ModelParams& params, std::int64_t ground_count) {
  if (ground_count < 0) {
    throw DomainError("ground-state count must be >= 0");
  }
  return params.coupling * std::sqrt(static_cast<double>(ground_count));
}

double coupling_for_collective(double g_c, std::int64_t ground_count) {
  if (ground_count < 1) {
    throw DomainError("collective coupling needs at least one ground-state pair");
  }
  return g_c / std::sqrt(static_cast<double>(ground_count));
}

ModelParams reference_params() {
  ModelParams p;
  p.n_pairs = 10000;
  p.cavity_decay = 1.0;
  p.coupling = coupling_for_collective(0.2, p.n_pairs);
  p.pair_decay = 3e-7;
  p.pair_pump = 1e-4 * p.pair_decay;
  p.cavity_pump = 0.0;
  p.detuning = 0.2;
  p.tunneling = 0.1;
  p.acceptor_relaxation = 1e-2;
  return p;
}

}  // namespace cavity_et
