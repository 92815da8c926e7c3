#include "cavity_et/cli/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cavity_et/oracle.hpp"
#include "cavity_et/overlaps.hpp"
#include "cavity_et/spectra.hpp"

namespace cavity_et::cli {

namespace {

double relative(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

CheckResult finish(std::string name, double worst, double tolerance, std::string detail = {}) {
  CheckResult r;
  r.name = std::move(name);
  r.worst = worst;
  r.tolerance = tolerance;
  r.passed = std::isfinite(worst) && worst < tolerance;
  r.detail = std::move(detail);
  return r;
}

std::int64_t random_ground_count(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> expo(0.0, 4.0);
  return static_cast<std::int64_t>(std::llround(std::pow(10.0, expo(rng))));
}

template <int N>
double residual(const SquareMatrix<N>& a, const SmallEigensystem<N>& sys) {
  double worst = 0.0;
  for (int k = 0; k < N; ++k) {
    const auto v = sys.right.col(k);
    worst = std::max(worst, (a * v - sys.eigenvalues[static_cast<std::size_t>(k)] * v).norm());
  }
  return worst / a.norm();
}

template <int N>
double biorthogonality(const SmallEigensystem<N>& sys) {
  const SquareMatrix<N> id = SquareMatrix<N>::Identity();
  return std::max((sys.inverse_rows * sys.right - id).cwiseAbs().maxCoeff(),
                  (sys.right * sys.inverse_rows - id).cwiseAbs().maxCoeff());
}

// Runs `measure` on both blocks of `draws` random parameter sets.
template <typename Measure>
std::pair<double, std::string> over_random_blocks(const ValidationOptions& options,
                                                  std::uint64_t stream, Measure measure) {
  std::mt19937_64 rng(options.seed + stream);
  double worst = 0.0;
  int exceptional = 0;
  for (int draw = 0; draw < options.eigen_draws; ++draw) {
    const ModelParams p = random_parameters(rng, 10000);
    const std::int64_t m = random_ground_count(rng);
    try {
      const Matrix2c d = dark_block_matrix(p);
      const Matrix3c b = bright_block_matrix(p, m);
      worst = std::max({worst, measure(d, solve_small_nonhermitian(d)),
                        measure(b, solve_small_nonhermitian(b))});
    } catch (const ExceptionalPointError&) {
      ++exceptional;
    }
  }
  std::ostringstream detail;
  detail << options.eigen_draws << " draws";
  if (exceptional) {
    detail << ", " << exceptional << " exceptional";
    worst = std::numeric_limits<double>::infinity();
  }
  return {worst, detail.str()};
}

}  // namespace

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

ModelParams random_parameters(std::mt19937_64& rng, std::int64_t n_pairs) {
  std::uniform_real_distribution<double> expo(-4.0, 0.0);
  std::uniform_real_distribution<double> sym(-0.5, 0.5);
  auto rate = [&] { return std::pow(10.0, expo(rng)); };
  ModelParams p;
  p.coupling = rate();
  p.cavity_decay = rate();
  p.cavity_pump = rate();
  p.pair_decay = rate();
  p.pair_pump = rate();
  p.acceptor_relaxation = rate();
  p.detuning = sym(rng);
  p.tunneling = sym(rng);
  p.n_pairs = n_pairs;
  return p;
}

CheckResult check_eigen_residuals(const ValidationOptions& options) {
  const auto [worst, detail] = over_random_blocks(
      options, 1, [](const auto& a, const auto& sys) { return residual(a, sys); });
  return finish("eigen residual", worst, 1e-12, detail);
}

CheckResult check_biorthogonality(const ValidationOptions& options) {
  const auto [worst, detail] = over_random_blocks(
      options, 1, [](const auto&, const auto& sys) { return biorthogonality(sys); });
  return finish("biorthogonality", worst, 1e-12, detail);
}

CheckResult check_oracle_equivalence(const ValidationOptions& options) {
  std::mt19937_64 rng(options.seed + 2);
  double worst = 0.0;
  for (std::int64_t m = 1; m <= 4; ++m) {
    for (int set = 0; set < options.oracle_sets; ++set) {
      const ModelParams p = random_parameters(rng, 4);
      const double formula = transfer_rate(p, m, options.propagator).r_tot;
      worst = std::max(worst, relative(formula, brute_force_rate(p, m)));
    }
  }
  return finish("oracle equivalence", worst, 1e-8,
                "M = 1..4, " + std::to_string(options.oracle_sets) + " sets each");
}

CheckResult check_cross_terms(const ValidationOptions& options) {
  std::mt19937_64 rng(options.seed + 3);
  double worst = 0.0;
  for (std::int64_t m = 2; m <= 6; ++m) {
    for (int set = 0; set < options.oracle_sets; ++set) {
      const ModelParams p = random_parameters(rng, 6);
      const ChannelSums sums = explicit_channel_sums(p, m);
      const double total = (sums.bright_bright + sums.bright_dark + sums.dark_dark).real();
      worst = std::max(worst, std::abs(sums.bright_dark) / total);
    }
  }
  return finish("bright-dark cross terms", worst, 1e-10, "relative to r_tot, M = 2..6");
}

CheckResult check_dark_reduction(const ValidationOptions& options) {
  std::mt19937_64 rng(options.seed + 4);
  double worst = 0.0;
  for (std::int64_t m = 2; m <= 6; ++m) {
    for (int set = 0; set < options.oracle_sets; ++set) {
      const ModelParams p = random_parameters(rng, 6);
      const DarkEigensystem dark = dark_block(p);
      const BrightEigensystem bright = bright_block(p, m);
      const cplx closed = dark_channel(p, dark, overlap_table(bright, dark), options.propagator);
      const cplx explicit_sum = explicit_channel_sums(p, m).dark_dark;
      worst = std::max(worst, std::abs(closed - explicit_sum) / std::abs(explicit_sum));
    }
  }
  return finish("dark-dark reduction", worst, 1e-10, "M = 2..6");
}

CheckResult check_linearity(const ValidationOptions& options) {
  std::mt19937_64 rng(options.seed + 5);
  double worst = 0.0;
  for (int set = 0; set < options.oracle_sets; ++set) {
    const ModelParams p = random_parameters(rng, 1000);
    const std::int64_t m = random_ground_count(rng) % 1000 + 1;
    const RateBreakdown r = transfer_rate(p, m, options.propagator);
    worst = std::max(worst, relative(r.r_cav + r.r_ind, r.r_tot));

    ModelParams doubled = p;
    doubled.cavity_pump *= 2.0;
    doubled.pair_pump *= 3.0;
    const RateBreakdown r2 = transfer_rate(doubled, m, options.propagator);
    worst = std::max({worst, relative(r2.r_cav, 2.0 * r.r_cav), relative(r2.r_ind, 3.0 * r.r_ind),
                      relative(r2.r_bare, 3.0 * r.r_bare)});

    const RateBreakdown single = transfer_rate(p, 1, options.propagator);
    worst = std::max(worst, relative(r.r_bare, static_cast<double>(m) * single.r_bare));
  }
  return finish("linearity", worst, 1e-10, "pump scaling, channel sum, r_bare ~ M");
}

ValidationReport run_validation(const ValidationOptions& options) {
  ValidationReport report;
  report.checks.push_back(check_eigen_residuals(options));
  report.checks.push_back(check_biorthogonality(options));
  report.checks.push_back(check_oracle_equivalence(options));
  report.checks.push_back(check_cross_terms(options));
  report.checks.push_back(check_dark_reduction(options));
  report.checks.push_back(check_linearity(options));

  if (options.config) {
    const ModelParams& p = *options.config;
    // Surfaces ExceptionalPointError for configurations at an exceptional point.
    const RateBreakdown full = transfer_rate(p, p.n_pairs, options.propagator);
    double worst = relative(full.r_cav + full.r_ind, full.r_tot);
    for (std::int64_t m = 1; m <= std::min<std::int64_t>(p.n_pairs, kOracleMaxPairs); ++m)
      worst = std::max(worst, relative(transfer_rate(p, m, options.propagator).r_tot,
                                       brute_force_rate(p, m)));
    report.checks.push_back(finish("config oracle equivalence", worst, 1e-8,
                                   "M = 1.." + std::to_string(std::min<std::int64_t>(
                                                   p.n_pairs, kOracleMaxPairs))));
  }
  return report;
}

void print_report(std::ostream& out, const ValidationReport& report) {
  for (const CheckResult& c : report.checks) {
    char line[256];
    std::snprintf(line, sizeof line, "%-4s %-28s worst %.3e  (tolerance %.1e)", c.passed ? "PASS" : "FAIL",
                  c.name.c_str(), c.worst, c.tolerance);
    out << line;
    if (!c.detail.empty()) out << "  [" << c.detail << "]";
    out << '\n';
  }
  const auto failed = std::count_if(report.checks.begin(), report.checks.end(),
                                    [](const CheckResult& c) { return !c.passed; });
  if (failed == 0) {
    out << "all " << report.checks.size() << " checks passed\n";
  } else {
    out << failed << " of " << report.checks.size() << " checks failed:";
    for (const CheckResult& c : report.checks)
      if (!c.passed) out << ' ' << c.name << ';';
    out << '\n';
  }
}

}  // namespace cavity_et::cli
