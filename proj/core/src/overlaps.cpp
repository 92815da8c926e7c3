#include "cavity_et/overlaps.hpp"

#include <cmath>

namespace cavity_et {

BrightOverlaps bright_overlaps(const BrightEigensystem& sys) {
  if (sys.ground_count < 1) {
    throw DomainError("bright overlaps need at least one ground-state pair");
  }
  const double root_m = std::sqrt(static_cast<double>(sys.ground_count));
  BrightOverlaps out;
  out.ground_count = sys.ground_count;
  for (int s = 0; s < 3; ++s) {
    const auto i = static_cast<std::size_t>(s);
    out.c_ph[i] = sys.eig.inverse_rows(s, 0);
    out.ctilde_D0[i] = sys.eig.inverse_rows(s, 1) / root_m;
    out.ctilde_A0[i] = sys.eig.inverse_rows(s, 2) / root_m;
    out.cbar_ph[i] = sys.eig.right(0, s);
    out.cbartilde_D[i] = sys.eig.right(1, s) / root_m;
    out.cbartilde_A[i] = sys.eig.right(2, s) / root_m;
  }
  return out;
}

DarkOverlaps dark_overlaps(const DarkEigensystem& sys, std::int64_t ground_count) {
  if (ground_count < 2) {
    throw DomainError("dark states exist only for M >= 2");
  }
  const double root_m = std::sqrt(static_cast<double>(ground_count));
  DarkOverlaps out;
  out.ground_count = ground_count;
  for (int f = 0; f < 2; ++f) {
    const auto i = static_cast<std::size_t>(f);
    out.ctilde_Dk[i] = sys.eig.inverse_rows(f, 0) / root_m;
    out.ctilde_Ak[i] = sys.eig.inverse_rows(f, 1) / root_m;
    out.cbartilde_D[i] = sys.eig.right(0, f) / root_m;
    out.cbartilde_A[i] = sys.eig.right(1, f) / root_m;
  }
  return out;
}

OverlapTable overlap_table(const BrightEigensystem& bright, const DarkEigensystem& dark) {
  OverlapTable out;
  out.ground_count = bright.ground_count;
  out.bright = bright_overlaps(bright);
  if (bright.ground_count >= 2) out.dark = dark_overlaps(dark, bright.ground_count);
  return out;
}

}  // namespace cavity_et
