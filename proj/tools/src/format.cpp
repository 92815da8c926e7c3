#include "cavity_et/cli/format.hpp"

#include <cmath>
#include <cstdio>

namespace cavity_et::cli {

std::string format_double(double value) {
  if (std::isnan(value)) return "NaN";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string json_double(double value) {
  return std::isfinite(value) ? format_double(value) : "null";
}

}  // namespace cavity_et::cli
