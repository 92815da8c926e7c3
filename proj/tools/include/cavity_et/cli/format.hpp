#pragma once

#include <string>

namespace cavity_et::cli {

/// Round-trip decimal form of a double (17 significant digits, "NaN"/"inf" for
/// non-finite values).
std::string format_double(double value);

/// JSON form: like format_double but non-finite values become `null`.
std::string json_double(double value);

}  // namespace cavity_et::cli
