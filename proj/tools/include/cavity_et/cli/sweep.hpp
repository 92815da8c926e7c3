#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cavity_et/cli/config.hpp"
#include "cavity_et/rates.hpp"

namespace cavity_et::cli {

/// One sweep axis: a model field name (or `g_c`, `M`) and its grid values.
struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

/// Two-dimensional rate sweep.
///
/// `base` holds the fixed parameters as in a flat config, except that `g_c` may
/// replace `g` (resolved per cell to g = g_c / sqrt(M)). `ties` rescale a field
/// with another after the axes are applied, e.g. kappa_plus = 1e-3 * kappa.
struct SweepSpec {
  Json base;
  SweepAxis axis1;
  SweepAxis axis2;
  std::map<std::string, std::pair<std::string, double>> ties;
};

/// Parameters and ground count of one grid cell.
struct SweepCell {
  double axis1 = 0.0;
  double axis2 = 0.0;
  ModelParams params;
  std::int64_t ground_count = 0;
};

struct SweepRow {
  double axis1 = 0.0;
  double axis2 = 0.0;
  RateBreakdown rates;
};

/// Parses a sweep document:
///   {"base": {...}, "axis1": {...}, "axis2": {...}, "ties": {...}}
/// where an axis is {"name", "values": [...]} or
/// {"name", "scale": "log"|"linear", "min", "max", "count"}.
SweepSpec parse_sweep_spec(const Json& doc);

/// Grid values of an axis document.
std::vector<double> axis_values(const Json& axis, const std::string& where);

/// Resolves every cell in axis1-major order. Invalid cells are a ConfigError.
std::vector<SweepCell> sweep_cells(const SweepSpec& spec);

/// Rates for every cell (axis1-major); exceptional points are flagged, not thrown.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::size_t threads);

/// CSV with header `axis1,axis2,r_tot,r_cav,r_ind,r_bare,flag`.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace cavity_et::cli
