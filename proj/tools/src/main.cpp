#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cavity_et/cli/commands.hpp"
#include "cavity_et/cli/config.hpp"
#include "cavity_et/cli/sweep.hpp"
#include "cavity_et/cli/validation.hpp"
#include "cavity_et/parallel.hpp"

namespace {

using namespace cavity_et;
using namespace cavity_et::cli;

constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitExceptionalPoint = 3;
constexpr int kExitStalled = 4;
constexpr int kExitDimension = 5;

struct Arguments {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::int64_t> ground_count;
  double t_min = kDefaultTimeMin;
  int points_per_decade = kDefaultPointsPerDecade;
};

std::size_t resolve_threads(const std::optional<std::size_t>& flag) {
  if (flag) {
    if (*flag == 0) throw ConfigError("threads", "--threads must be >= 1");
    return *flag;
  }
  if (const char* env = std::getenv("CAVITY_ET_THREADS"); env && *env) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (*end != '\0' || value < 1) throw ConfigError("CAVITY_ET_THREADS", "CAVITY_ET_THREADS must be a positive integer");
    return static_cast<std::size_t>(value);
  }
  return hardware_threads();
}

// Writes through `emit` to --out if given, stdout otherwise.
template <typename Emit>
void with_output(const std::string& out, Emit emit) {
  if (out.empty()) {
    emit(std::cout);
    return;
  }
  std::ofstream file(out);
  if (!file) throw ConfigError("out", "cannot write '" + out + "'");
  emit(file);
}

RunOptions run_options(const Arguments& args) {
  RunOptions options;
  options.seed = args.seed;
  options.threads = resolve_threads(args.threads);
  options.t_min = args.t_min;
  options.points_per_decade = args.points_per_decade;
  return options;
}

int run(const std::string& command, const Arguments& args) {
  if (command == "rate") {
    const RunConfig cfg = parse_run_config(load_json(args.config));
    const RateBreakdown r = cmd_rate(cfg, args.ground_count);
    with_output(args.out, [&](std::ostream& os) { write_rate_json(os, cfg, r); });
  } else if (command == "sweep") {
    const SweepSpec spec = parse_sweep_spec(load_json(args.config));
    const auto rows = run_sweep(spec, resolve_threads(args.threads));
    with_output(args.out, [&](std::ostream& os) { write_sweep_csv(os, rows); });
  } else if (command == "evolve") {
    const RunConfig cfg = parse_run_config(load_json(args.config));
    const auto ensemble = cmd_evolve(cfg, run_options(args));
    with_output(args.out, [&](std::ostream& os) { write_evolve_csv(os, ensemble); });
  } else if (command == "fullsim") {
    const RunConfig cfg = parse_run_config(load_json(args.config));
    const auto ensemble = cmd_fullsim(cfg, run_options(args));
    with_output(args.out, [&](std::ostream& os) { write_fullsim_csv(os, ensemble); });
  } else if (command == "validate") {
    ValidationOptions options;
    if (args.seed) options.seed = *args.seed;
    if (!args.config.empty()) options.config = parse_run_config(load_json(args.config)).params;
    const ValidationReport report = run_validation(options);
    with_output(args.out, [&](std::ostream& os) { print_report(os, report); });
    return report.passed() ? 0 : kExitValidation;
  } else if (command == "figures") {
    const Json recipe = load_json(args.config);
    cmd_figures(recipe, args.out.empty() ? "." : args.out, run_options(args), std::cerr);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity-modified electron transfer: rates, sweeps and trajectory simulations"};
  app.require_subcommand(1);
  Arguments args;

  struct Command {
    const char* name;
    const char* help;
    bool config_required;
  };
  const Command commands[] = {
      {"rate", "Rate breakdown at one ground count (JSON)", true},
      {"sweep", "Two-axis rate sweep (CSV)", true},
      {"evolve", "Effective-dynamics trajectory ensemble (CSV)", true},
      {"fullsim", "Full master-equation trajectories, N <= 12 (CSV)", true},
      {"validate", "Oracle, identity and eigensolver checks", false},
      {"figures", "Generate all datasets of a figure recipe into --out <dir>", true},
  };
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    auto* config = sub->add_option("--config", args.config, "Parameter, sweep or recipe file");
    if (c.config_required) config->required();
    sub->add_option("--out", args.out, "Output file (directory for figures); stdout if omitted");
    sub->add_option("--seed", args.seed, "Base seed (overrides the config file)");
    sub->add_option("--threads", args.threads, "Worker threads (fallback: CAVITY_ET_THREADS)");
    if (std::string(c.name) == "rate")
      sub->add_option("--M", args.ground_count, "Ground-state count (default: N_total)");
    if (std::string(c.name) == "evolve" || std::string(c.name) == "fullsim" ||
        std::string(c.name) == "figures") {
      sub->add_option("--t-min", args.t_min, "First time-grid point");
      sub->add_option("--points-per-decade", args.points_per_decade, "Time-grid density");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ExceptionalPointError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitExceptionalPoint;
  } catch (const StalledProcessError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStalled;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDimension;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
