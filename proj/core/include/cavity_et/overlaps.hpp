#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "cavity_et/spectra.hpp"

namespace cavity_et {

/// Overlap coefficients of the three bright states in quasi-momentum-reduced form.
///
/// The un-barred coefficients are inverse-bra components: c_ph is the photon
/// component, ctilde_D0 / ctilde_A0 the k = 0 Fourier components of the
/// donor / acceptor components (position-space value divided by sqrt(M)). The
/// barred coefficients are right-eigenvector components with the same scaling.
struct BrightOverlaps {
  std::int64_t ground_count = 0;
  std::array<cplx, 3> c_ph{};
  std::array<cplx, 3> ctilde_D0{};
  std::array<cplx, 3> ctilde_A0{};
  std::array<cplx, 3> cbar_ph{};
  std::array<cplx, 3> cbartilde_D{};
  std::array<cplx, 3> cbartilde_A{};
};

/// Overlap coefficients of the two dark families (k-independent). Index 0 is
/// the family with the larger real energy.
struct DarkOverlaps {
  std::int64_t ground_count = 0;
  std::array<cplx, 2> ctilde_Dk{};
  std::array<cplx, 2> ctilde_Ak{};
  std::array<cplx, 2> cbartilde_D{};
  std::array<cplx, 2> cbartilde_A{};
};

/// All coefficient families at a fixed ground-state count. `dark` is empty for
/// M = 1, where no dark states exist.
struct OverlapTable {
  std::int64_t ground_count = 0;
  BrightOverlaps bright;
  std::optional<DarkOverlaps> dark;
};

BrightOverlaps bright_overlaps(const BrightEigensystem& sys);

/// Throws DomainError for M < 2.
DarkOverlaps dark_overlaps(const DarkEigensystem& sys, std::int64_t ground_count);

OverlapTable overlap_table(const BrightEigensystem& bright, const DarkEigensystem& dark);

}  // namespace cavity_et
