#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cavity_et/cli/commands.hpp"
#include "cavity_et/cli/config.hpp"
#include "cavity_et/cli/format.hpp"
#include "cavity_et/cli/sweep.hpp"
#include "cavity_et/cli/validation.hpp"

using namespace cavity_et;
using namespace cavity_et::cli;

namespace {

Json reference_doc() {
  return Json{{"g", 0.002},        {"kappa", 1.0}, {"kappa_plus", 1e-3}, {"gamma", 3e-7},
              {"gamma_plus", 3e-10}, {"eta", 1e-2}, {"delta", 0.2},       {"V", 0.1},
              {"N_total", 10000}};
}

Json small_doc() {
  Json d = reference_doc();
  d["N_total"] = 8;
  d["g"] = 0.2 / std::sqrt(8.0);
  d["kappa_plus"] = 1e-2;
  d["gamma_plus"] = 5e-8;
  d["n_trajectories"] = 20;
  d["t_max"] = 1e6;
  return d;
}

Json sweep_doc() {
  Json base = reference_doc();
  base.erase("g");
  base["g_c"] = 0.2;
  return Json{{"base", base},
              {"axis1", {{"name", "kappa_plus"}, {"values", {1e-4, 1e-3}}}},
              {"axis2", {{"name", "g_c"}, {"scale", "log"}, {"min", 1e-2}, {"max", 1.0}, {"count", 3}}}};
}

std::string field_of(const Json& doc) {
  try {
    parse_run_config(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

cplx flipped_propagator(cplx e_psi, cplx e_phi) { return -propagator(e_psi, e_phi); }

}  // namespace

TEST(Config, ParsesAllFields) {
  Json d = reference_doc();
  d["seed"] = 9;
  d["unit"] = "kappa_0";
  d["N_total"] = 1e4;  // integral floats are accepted
  const RunConfig cfg = parse_run_config(d);
  EXPECT_EQ(cfg.params.n_pairs, 10000);
  EXPECT_EQ(cfg.params.cavity_pump, 1e-3);
  EXPECT_EQ(cfg.params.tunneling, 0.1);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(parse_run_config(to_json(cfg)).params, cfg.params);
}

TEST(Config, ErrorsNameTheKey) {
  Json typo = reference_doc();
  typo["kapa"] = 1.0;
  EXPECT_EQ(field_of(typo), "kapa");
  Json missing = reference_doc();
  missing.erase("eta");
  EXPECT_EQ(field_of(missing), "eta");
  Json bad = reference_doc();
  bad["eta"] = 0.0;
  EXPECT_EQ(field_of(bad), "eta");
  bad = reference_doc();
  bad["N_total"] = 2.5;
  EXPECT_EQ(field_of(bad), "N_total");
  bad = reference_doc();
  bad["delta"] = "0.2";
  EXPECT_EQ(field_of(bad), "delta");
  bad = reference_doc();
  bad["n_trajectories"] = 1;
  EXPECT_EQ(field_of(bad), "n_trajectories");
  EXPECT_EQ(field_of(Json::array()), "");
}

TEST(Config, MalformedFile) {
  const auto path = std::filesystem::temp_directory_path() / "cavity_et_malformed.json";
  std::ofstream(path) << "{\"g\": 0.1,";
  EXPECT_THROW(load_json(path), ConfigError);
  EXPECT_THROW(load_json("/nonexistent/file.json"), ConfigError);
}

TEST(Format, RoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 2.5204193186600685, 1e-300, -7e22}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(std::nan("")), "NaN");
  EXPECT_EQ(json_double(std::nan("")), "null");
}

TEST(Rate, NanocrystalEnhancement) {
  const RunConfig cfg = parse_run_config(reference_doc());
  const RateBreakdown r = cmd_rate(cfg, std::nullopt);
  EXPECT_EQ(r.ground_count, 10000);
  EXPECT_GT(r.r_cav / r.r_bare, 2.0);
  EXPECT_LT(r.r_cav / r.r_bare, 3.0);
  std::ostringstream json;
  write_rate_json(json, cfg, r);
  const Json back = Json::parse(json.str());
  EXPECT_EQ(back.at("r_tot").get<double>(), r.r_tot);
  EXPECT_EQ(back.at("M").get<std::int64_t>(), 10000);
}

TEST(Rate, CavityPumpWithoutCouplingGivesZero) {
  Json d = reference_doc();
  d["g"] = 0.0;
  d["gamma_plus"] = 0.0;
  const RateBreakdown r = cmd_rate(parse_run_config(d), 100);
  EXPECT_EQ(r.r_tot, 0.0);
}

TEST(Sweep, AxisGrids) {
  const auto lin = axis_values(Json{{"name", "delta"}, {"scale", "linear"}, {"min", -1.0}, {"max", 1.0}, {"count", 5}}, "a");
  EXPECT_EQ(lin, (std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0}));
  const auto lg = axis_values(Json{{"name", "g_c"}, {"min", 1e-3}, {"max", 1.0}, {"count", 4}}, "a");
  EXPECT_EQ(lg.front(), 1e-3);
  EXPECT_EQ(lg.back(), 1.0);
  EXPECT_NEAR(lg[1], 1e-2, 1e-17);
  EXPECT_THROW(axis_values(Json{{"name", "g_c"}, {"min", 0.0}, {"max", 1.0}, {"count", 4}}, "a"), ConfigError);
  EXPECT_THROW(axis_values(Json{{"name", "g_c"}, {"min", 1.0}, {"max", 1.0}, {"count", 0}}, "a"), ConfigError);
}

TEST(Sweep, AxisMajorOrderAndGcResolution) {
  const SweepSpec spec = parse_sweep_spec(sweep_doc());
  const auto cells = sweep_cells(spec);
  ASSERT_EQ(cells.size(), 6u);
  EXPECT_EQ(cells[0].axis1, 1e-4);
  EXPECT_EQ(cells[2].axis1, 1e-4);
  EXPECT_EQ(cells[3].axis1, 1e-3);
  EXPECT_EQ(cells[1].axis2, cells[4].axis2);
  for (const auto& c : cells) {
    EXPECT_NEAR(collective_coupling(c.params, c.ground_count), c.axis2, 1e-15 * c.axis2);
    EXPECT_EQ(c.params.cavity_pump, c.axis1);
  }
}

TEST(Sweep, SingleCellGrid) {
  Json d = sweep_doc();
  d["axis1"] = {{"name", "kappa_plus"}, {"values", {1e-3}}};
  d["axis2"] = {{"name", "g_c"}, {"values", {0.2}}};
  const auto rows = run_sweep(parse_sweep_spec(d), 1);
  ASSERT_EQ(rows.size(), 1u);
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  std::istringstream lines(csv.str());
  std::string header, row, extra;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header, "axis1,axis2,r_tot,r_cav,r_ind,r_bare,flag");
  EXPECT_FALSE(std::getline(lines, extra));
  // Matches the single-point rate command exactly.
  const RateBreakdown r = cmd_rate(parse_run_config(reference_doc()), std::nullopt);
  EXPECT_EQ(rows[0].rates.r_tot, r.r_tot);
}

TEST(Sweep, GroundCountAxisAndTies) {
  Json d = sweep_doc();
  d["axis1"] = {{"name", "M"}, {"scale", "log"}, {"min", 1.0}, {"max", 1000.0}, {"count", 5}};
  d["axis2"] = {{"name", "kappa"}, {"values", {0.5, 2.0}}};
  d["ties"] = {{"kappa_plus", {"kappa", 1e-3}}};
  const auto cells = sweep_cells(parse_sweep_spec(d));
  for (const auto& c : cells) {
    EXPECT_EQ(c.axis1, std::round(c.axis1));
    EXPECT_EQ(c.ground_count, static_cast<std::int64_t>(c.axis1));
    EXPECT_EQ(c.params.cavity_pump, 1e-3 * c.axis2);
    EXPECT_EQ(c.params.n_pairs, 10000);
  }
}

TEST(Sweep, ExceptionalPointRowsAreFlagged) {
  Json d = sweep_doc();
  d["base"]["gamma"] = 0.0;
  d["base"]["gamma_plus"] = 0.0;
  d["base"]["eta"] = 0.4;
  d["axis1"] = {{"name", "V"}, {"values", {0.1, 0.3}}};
  d["axis2"] = {{"name", "delta"}, {"values", {0.0}}};
  const auto rows = run_sweep(parse_sweep_spec(d), 2);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0].rates.exceptional);
  EXPECT_TRUE(std::isnan(rows[0].rates.r_tot));
  EXPECT_FALSE(rows[1].rates.exceptional);
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  EXPECT_NE(csv.str().find("0.10000000000000001,0,NaN,NaN,NaN,NaN,EP\n"), std::string::npos);
}

TEST(Sweep, SpecErrors) {
  Json d = sweep_doc();
  d["axis1"]["name"] = "kapa";
  EXPECT_THROW(parse_sweep_spec(d), ConfigError);
  d = sweep_doc();
  d["extra"] = 1;
  EXPECT_THROW(parse_sweep_spec(d), ConfigError);
  d = sweep_doc();
  d["base"]["g"] = 0.002;  // g and g_c both fixed
  d["axis2"]["name"] = "delta";
  EXPECT_THROW(parse_sweep_spec(d), ConfigError);
  d = sweep_doc();
  d["axis2"] = d["axis1"];
  EXPECT_THROW(parse_sweep_spec(d), ConfigError);
  d = sweep_doc();
  d["ties"] = {{"kappa_plus", {"nope", 1.0}}};
  EXPECT_THROW(parse_sweep_spec(d), ConfigError);
}

TEST(Sweep, ParallelMatchesSerial) {
  const SweepSpec spec = parse_sweep_spec(sweep_doc());
  std::ostringstream a, b;
  write_sweep_csv(a, run_sweep(spec, 1));
  write_sweep_csv(b, run_sweep(spec, 3));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Evolve, DeterministicUnderSeed) {
  Json d = reference_doc();
  d["N_total"] = 50;
  d["n_trajectories"] = 30;
  d["seed"] = 4;
  const RunConfig cfg = parse_run_config(d);
  RunOptions serial;
  RunOptions parallel;
  parallel.threads = 3;
  std::ostringstream a, b;
  write_evolve_csv(a, cmd_evolve(cfg, serial));
  write_evolve_csv(b, cmd_evolve(cfg, parallel));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, 19), "t,mean_NG,stderr_NG");
  RunOptions other;
  other.seed = 5;
  std::ostringstream c;
  write_evolve_csv(c, cmd_evolve(cfg, other));
  EXPECT_NE(a.str(), c.str());
}

TEST(Evolve, SinglePair) {
  Json d = reference_doc();
  d["N_total"] = 1;
  d["n_trajectories"] = 200;
  const auto e = cmd_evolve(parse_run_config(d), RunOptions{});
  for (const auto& jumps : e.jump_times) EXPECT_EQ(jumps.size(), 1u);
  for (double v : e.mean_NG) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Evolve, ZeroRateStalls) {
  Json d = reference_doc();
  d["kappa_plus"] = 0.0;
  d["gamma_plus"] = 0.0;
  d["N_total"] = 10;
  EXPECT_THROW(cmd_evolve(parse_run_config(d), RunOptions{}), StalledProcessError);
}

TEST(Evolve, TimeGrid) {
  RunConfig cfg = parse_run_config(reference_doc());
  cfg.t_max = 1e6;
  const auto grid = time_grid(cfg, RunOptions{}, 1e9);
  EXPECT_EQ(grid.size(), 81u);
  EXPECT_EQ(grid.front(), 1e2);
  EXPECT_NEAR(grid.back(), 1e6, 1e-9);
}

TEST(FullSimCommand, NoPumpKeepsGroundState) {
  Json d = small_doc();
  d["kappa_plus"] = 0.0;
  d["gamma_plus"] = 0.0;
  d["n_trajectories"] = 3;
  const auto e = cmd_fullsim(parse_run_config(d), RunOptions{});
  for (double v : e.mean_NG) EXPECT_EQ(v, 8.0);
  std::ostringstream csv;
  write_fullsim_csv(csv, e);
  EXPECT_EQ(csv.str().substr(0, 27), "t,mean_NG,stderr_NG,mean_Ne");
}

TEST(FullSimCommand, DimensionGuard) {
  Json d = small_doc();
  d["N_total"] = 13;
  EXPECT_THROW(cmd_fullsim(parse_run_config(d), RunOptions{}), DimensionError);
}

TEST(FullSimCommand, Deterministic) {
  const RunConfig cfg = parse_run_config(small_doc());
  RunOptions a_opt, b_opt;
  b_opt.threads = 2;
  std::ostringstream a, b;
  write_fullsim_csv(a, cmd_fullsim(cfg, a_opt));
  write_fullsim_csv(b, cmd_fullsim(cfg, b_opt));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Figures, WritesEveryDataset) {
  Json sweep = sweep_doc();
  Json evolve = reference_doc();
  evolve["N_total"] = 20;
  evolve["n_trajectories"] = 10;
  const Json recipe{{"figure", "test"},
                    {"datasets",
                     {{{"name", "s"}, {"command", "sweep"}, {"config", sweep}},
                      {{"name", "e"}, {"command", "evolve"}, {"config", evolve}}}}};
  const auto dir = std::filesystem::temp_directory_path() / "cavity_et_figures_test";
  std::filesystem::remove_all(dir);
  std::ostringstream log;
  const auto paths = cmd_figures(recipe, dir, RunOptions{}, log);
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(dir / "s.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "e.csv"));

  Json bad = recipe;
  bad["datasets"][1]["config"]["kapa"] = 1;
  std::filesystem::remove_all(dir);
  EXPECT_THROW(cmd_figures(bad, dir, RunOptions{}, log), ConfigError);
  EXPECT_FALSE(std::filesystem::exists(dir / "s.csv"));  // nothing written before the error
}

TEST(Figures, ShippedRecipesParse) {
  const std::filesystem::path figs = CAVITY_ET_SOURCE_DIR "/figs";
  for (const char* name : {"fig1e", "fig2", "fig3", "fig4a", "fig4b", "fig4cd", "fig5"}) {
    const Json recipe = load_json(figs / (std::string(name) + ".json"));
    for (const Json& d : recipe.at("datasets")) {
      if (d.at("command") == "sweep") {
        EXPECT_NO_THROW(parse_sweep_spec(d.at("config"))) << name;
      } else {
        EXPECT_NO_THROW(parse_run_config(d.at("config"))) << name;
      }
    }
  }
}

TEST(Validation, DefaultRunPasses) {
  const ValidationReport report = run_validation(ValidationOptions{});
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.checks.size(), 6u);
}

TEST(Validation, DetectsSignFlippedPropagator) {
  ValidationOptions options;
  options.propagator = flipped_propagator;
  const ValidationReport report = run_validation(options);
  EXPECT_FALSE(report.passed());
  for (const CheckResult& c : report.checks) {
    if (c.name == "oracle equivalence" || c.name == "dark-dark reduction") {
      EXPECT_FALSE(c.passed);
    }
    if (c.name == "eigen residual") {
      EXPECT_TRUE(c.passed);
    }
  }
  std::ostringstream out;
  print_report(out, report);
  EXPECT_NE(out.str().find("FAIL oracle equivalence"), std::string::npos);
}

TEST(Validation, ExceptionalConfigSurfaces) {
  ValidationOptions options;
  options.eigen_draws = 10;
  options.oracle_sets = 2;
  ModelParams p = parse_run_config(reference_doc()).params;
  p.detuning = 0.0;
  p.pair_decay = 0.0;
  p.acceptor_relaxation = 0.4;
  p.tunneling = 0.1;
  options.config = p;
  EXPECT_THROW(run_validation(options), ExceptionalPointError);
}

TEST(Validation, ConfigCheckAtSmallSystem) {
  ValidationOptions options;
  options.config = parse_run_config(small_doc()).params;
  const ValidationReport report = run_validation(options);
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.checks.back().name, "config oracle equivalence");
}
