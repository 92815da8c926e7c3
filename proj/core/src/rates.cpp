#include "cavity_et/rates.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cavity_et/parallel.hpp"

namespace cavity_et {

namespace {

constexpr cplx kI{0.0, 1.0};

ModelParams cavity_only(ModelParams p) {
  p.pair_pump = 0.0;
  return p;
}

ModelParams individual_only(ModelParams p) {
  p.cavity_pump = 0.0;
  return p;
}

ModelParams bare(ModelParams p) {
  p.coupling = 0.0;
  p.cavity_pump = 0.0;
  return p;
}

cplx channel_total(const ModelParams& p, std::int64_t m, const DarkEigensystem& dark,
                   PropagatorFn prop) {
  const BrightEigensystem bright = bright_block(p, m);
  const OverlapTable table = overlap_table(bright, dark);
  return bright_channel(p, bright, table.bright, prop) + dark_channel(p, dark, table, prop);
}

RateBreakdown exceptional_entry(std::int64_t m) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return RateBreakdown{m, nan, nan, nan, nan, nan, true};
}

}  // namespace

cplx propagator(cplx e_psi, cplx e_phi) {
  const cplx denominator = kI * std::conj(e_psi) - kI * e_phi;
  if (denominator == cplx(0.0, 0.0)) {
    throw DomainError("propagator undefined between non-decaying states");
  }
  return 1.0 / denominator;
}

cplx bright_channel(const ModelParams& p, const BrightEigensystem& bright,
                    const BrightOverlaps& ov, PropagatorFn prop) {
  const auto m = static_cast<double>(ov.ground_count);
  cplx sum = 0.0;
  for (std::size_t psi = 0; psi < 3; ++psi) {
    for (std::size_t phi = 0; phi < 3; ++phi) {
      const cplx pump = p.cavity_pump * std::conj(ov.c_ph[psi]) * ov.c_ph[phi] +
                        p.pair_pump * m * std::conj(ov.ctilde_D0[psi]) * ov.ctilde_D0[phi];
      const cplx sink =
          p.acceptor_relaxation * m * std::conj(ov.cbartilde_A[psi]) * ov.cbartilde_A[phi];
      sum += pump * prop(bright.energy(static_cast<int>(psi)), bright.energy(static_cast<int>(phi))) *
             sink;
    }
  }
  return -sum;
}

cplx dark_channel(const ModelParams& p, const DarkEigensystem& dark, const OverlapTable& table,
                  PropagatorFn prop) {
  if (!table.dark) return 0.0;
  const DarkOverlaps& ov = *table.dark;
  const auto m = static_cast<double>(ov.ground_count);
  cplx sum = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      sum += std::conj(ov.ctilde_Dk[i]) * ov.ctilde_Dk[j] *
             prop(dark.energy(static_cast<int>(i)), dark.energy(static_cast<int>(j))) *
             std::conj(ov.cbartilde_A[i]) * ov.cbartilde_A[j];
    }
  }
  return -(m * m * (m - 1.0) * p.pair_pump * p.acceptor_relaxation) * sum;
}

RateBreakdown transfer_rate(const ModelParams& params, std::int64_t ground_count,
                            const DarkEigensystem& dark, PropagatorFn prop) {
  if (ground_count < 1) {
    throw DomainError("transfer rate needs at least one ground-state pair");
  }
  try {
    RateBreakdown out;
    out.ground_count = ground_count;
    const cplx total = channel_total(params, ground_count, dark, prop);
    out.r_tot = total.real();
    out.imag_residual = std::abs(total.imag());
    out.r_cav = channel_total(cavity_only(params), ground_count, dark, prop).real();
    out.r_ind = channel_total(individual_only(params), ground_count, dark, prop).real();
    out.r_bare = channel_total(bare(params), ground_count, dark, prop).real();
    return out;
  } catch (const ExceptionalPointError& e) {
    std::ostringstream msg;
    msg << e.what() << " at M = " << ground_count << " (g = " << params.coupling
        << ", kappa = " << params.cavity_decay << ", delta = " << params.detuning
        << ", V = " << params.tunneling << ")";
    throw ExceptionalPointError(msg.str(), e.eigenvalue_gap(), e.condition_number());
  }
}

RateBreakdown transfer_rate(const ModelParams& params, std::int64_t ground_count,
                            PropagatorFn prop) {
  DarkEigensystem dark;
  try {
    dark = dark_block(params);
  } catch (const ExceptionalPointError& e) {
    std::ostringstream msg;
    msg << e.what() << " in the dark block (delta = " << params.detuning
        << ", V = " << params.tunneling << ")";
    throw ExceptionalPointError(msg.str(), e.eigenvalue_gap(), e.condition_number());
  }
  return transfer_rate(params, ground_count, dark, prop);
}

std::vector<RateBreakdown> rate_table(const ModelParams& params, std::int64_t n_pairs,
                                      std::size_t threads) {
  if (n_pairs < 1) {
    throw DomainError("rate table needs at least one pair");
  }
  std::vector<RateBreakdown> table(static_cast<std::size_t>(n_pairs));
  DarkEigensystem dark;
  try {
    dark = dark_block(params);
  } catch (const ExceptionalPointError&) {
    for (std::size_t i = 0; i < table.size(); ++i)
      table[i] = exceptional_entry(static_cast<std::int64_t>(i) + 1);
    return table;
  }
  parallel_for(table.size(), threads, [&](std::size_t i) {
    const auto m = static_cast<std::int64_t>(i) + 1;
    try {
      table[i] = transfer_rate(params, m, dark);
    } catch (const ExceptionalPointError&) {
      table[i] = exceptional_entry(m);
    }
  });
  return table;
}

}  // namespace cavity_et
