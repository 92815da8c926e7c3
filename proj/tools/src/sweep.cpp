#include "cavity_et/cli/sweep.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <set>

#include "cavity_et/cli/format.hpp"
#include "cavity_et/parallel.hpp"

namespace cavity_et::cli {

namespace {

const std::set<std::string>& axis_names() {
  static const std::set<std::string> names{"g",     "kappa", "kappa_plus", "gamma", "gamma_plus",
                                           "eta",   "delta", "V",          "N_total", "g_c",
                                           "M"};
  return names;
}

double field_number(const Json& doc, const std::string& key, const std::string& where) {
  if (!doc.contains(key)) throw ConfigError(where + "." + key, "missing key '" + key + "' in " + where);
  if (!doc.at(key).is_number())
    throw ConfigError(where + "." + key, "'" + key + "' in " + where + " must be a number");
  return doc.at(key).get<double>();
}

void check_keys(const Json& doc, const std::set<std::string>& allowed, const std::string& where) {
  if (!doc.is_object()) throw ConfigError(where, where + " must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (!allowed.contains(key))
      throw ConfigError(where + "." + key, "unknown key '" + key + "' in " + where);
}

SweepAxis parse_axis(const Json& doc, const std::string& where) {
  if (!doc.contains("name") || !doc.at("name").is_string())
    throw ConfigError(where + ".name", where + " needs a string 'name'");
  SweepAxis axis{doc.at("name").get<std::string>(), axis_values(doc, where)};
  if (!axis_names().contains(axis.name))
    throw ConfigError(where + ".name", "unknown sweep axis '" + axis.name + "'");
  if (axis.name == "N_total" || axis.name == "M") {
    // Pair counts are integers; generated grids are rounded to the nearest one.
    for (double& v : axis.values) v = std::round(v);
  }
  return axis;
}

void set_field(Json& doc, const std::string& name, double value) {
  if (name == "N_total" || name == "M") {
    if (value != std::floor(value) || value < 1.0 || value > 9.0e15)
      throw ConfigError(name, "'" + name + "' must be a positive integer");
    doc[name] = static_cast<std::int64_t>(value);
  } else {
    doc[name] = value;
  }
}

}  // namespace

std::vector<double> axis_values(const Json& axis, const std::string& where) {
  if (axis.contains("values")) {
    check_keys(axis, {"name", "values"}, where);
    const Json& v = axis.at("values");
    if (!v.is_array() || v.empty())
      throw ConfigError(where + ".values", where + ".values must be a non-empty array");
    std::vector<double> out;
    for (const Json& x : v) {
      if (!x.is_number()) throw ConfigError(where + ".values", where + ".values must be numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  check_keys(axis, {"name", "scale", "min", "max", "count"}, where);
  const std::string scale = axis.value("scale", std::string("log"));
  const double lo = field_number(axis, "min", where);
  const double hi = field_number(axis, "max", where);
  if (!axis.contains("count") || !axis.at("count").is_number_integer() ||
      axis.at("count").get<std::int64_t>() < 1)
    throw ConfigError(where + ".count", where + ".count must be a positive integer");
  const auto count = axis.at("count").get<std::int64_t>();
  if (!(hi >= lo)) throw ConfigError(where + ".max", where + ": max must be >= min");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (scale == "log") {
    if (!(lo > 0.0)) throw ConfigError(where + ".min", where + ": log axis needs min > 0");
    const double a = std::log10(lo), b = std::log10(hi);
    for (std::int64_t k = 0; k < count; ++k)
      out[static_cast<std::size_t>(k)] =
          count == 1 ? lo : std::pow(10.0, a + (b - a) * static_cast<double>(k) / (count - 1));
    out.front() = lo;
    out.back() = count == 1 ? lo : hi;
  } else if (scale == "linear") {
    for (std::int64_t k = 0; k < count; ++k)
      out[static_cast<std::size_t>(k)] =
          count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (count - 1);
  } else {
    throw ConfigError(where + ".scale", where + ".scale must be 'log' or 'linear'");
  }
  return out;
}

SweepSpec parse_sweep_spec(const Json& doc) {
  check_keys(doc, {"base", "axis1", "axis2", "ties"}, "sweep");
  for (const char* key : {"base", "axis1", "axis2"})
    if (!doc.contains(key)) throw ConfigError(key, std::string("sweep needs '") + key + "'");
  SweepSpec spec;
  spec.base = doc.at("base");
  if (!spec.base.is_object()) throw ConfigError("base", "sweep.base must be a JSON object");
  spec.axis1 = parse_axis(doc.at("axis1"), "axis1");
  spec.axis2 = parse_axis(doc.at("axis2"), "axis2");
  if (spec.axis1.name == spec.axis2.name)
    throw ConfigError("axis2.name", "sweep axes must differ");
  if (doc.contains("ties")) {
    const Json& ties = doc.at("ties");
    if (!ties.is_object()) throw ConfigError("ties", "sweep.ties must be a JSON object");
    for (const auto& [target, rule] : ties.items()) {
      if (!axis_names().contains(target) || target == "M" || target == "N_total")
        throw ConfigError("ties." + target, "cannot tie '" + target + "'");
      if (!rule.is_array() || rule.size() != 2 || !rule[0].is_string() || !rule[1].is_number())
        throw ConfigError("ties." + target, "tie must be [\"source\", factor]");
      const std::string source = rule[0].get<std::string>();
      if (!axis_names().contains(source) || source == target)
        throw ConfigError("ties." + target, "unknown tie source '" + source + "'");
      spec.ties[target] = {source, rule[1].get<double>()};
    }
  }
  // Validate the whole grid eagerly so errors surface before any work.
  (void)sweep_cells(spec);
  return spec;
}

std::vector<SweepCell> sweep_cells(const SweepSpec& spec) {
  std::vector<SweepCell> cells;
  cells.reserve(spec.axis1.values.size() * spec.axis2.values.size());
  for (double a : spec.axis1.values) {
    for (double b : spec.axis2.values) {
      Json doc = spec.base;
      set_field(doc, spec.axis1.name, a);
      set_field(doc, spec.axis2.name, b);
      for (const auto& [target, rule] : spec.ties) {
        if (!doc.contains(rule.first))
          throw ConfigError("ties." + target, "tie source '" + rule.first + "' is not set");
        doc[target] = rule.second * doc.at(rule.first).get<double>();
      }

      std::optional<double> g_c;
      if (doc.contains("g_c")) {
        if (!doc.at("g_c").is_number()) throw ConfigError("g_c", "'g_c' must be a number");
        g_c = doc.at("g_c").get<double>();
        if (doc.contains("g") && !(spec.axis1.name == "g_c" || spec.axis2.name == "g_c"))
          throw ConfigError("g_c", "set either 'g' or 'g_c', not both");
        doc.erase("g_c");
        doc["g"] = 0.0;  // placeholder, resolved below
      }
      std::optional<std::int64_t> m;
      if (doc.contains("M")) {
        const Json& v = doc.at("M");
        const double d = v.is_number() ? v.get<double>() : 0.0;
        if (d < 1.0 || d != std::floor(d) || d > 9.0e15)
          throw ConfigError("M", "'M' must be a positive integer");
        m = static_cast<std::int64_t>(d);
        doc.erase("M");
      }
      SweepCell cell;
      cell.axis1 = a;
      cell.axis2 = b;
      cell.params = parse_run_config(doc).params;
      cell.ground_count = m.value_or(cell.params.n_pairs);
      if (g_c) {
        if (*g_c < 0.0) throw ConfigError("g_c", "'g_c' must be >= 0");
        cell.params.coupling = coupling_for_collective(*g_c, cell.ground_count);
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::size_t threads) {
  const std::vector<SweepCell> cells = sweep_cells(spec);
  std::vector<SweepRow> rows(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t i) {
    const SweepCell& cell = cells[i];
    SweepRow& row = rows[i];
    row.axis1 = cell.axis1;
    row.axis2 = cell.axis2;
    try {
      row.rates = transfer_rate(cell.params, cell.ground_count);
    } catch (const ExceptionalPointError&) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.rates = RateBreakdown{cell.ground_count, nan, nan, nan, nan, nan, true};
    }
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "axis1,axis2,r_tot,r_cav,r_ind,r_bare,flag\n";
  for (const SweepRow& row : rows) {
    out << format_double(row.axis1) << ',' << format_double(row.axis2) << ','
        << format_double(row.rates.r_tot) << ',' << format_double(row.rates.r_cav) << ','
        << format_double(row.rates.r_ind) << ',' << format_double(row.rates.r_bare) << ','
        << (row.rates.exceptional ? "EP" : "") << '\n';
  }
}

}  // namespace cavity_et::cli
