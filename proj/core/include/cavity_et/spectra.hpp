#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>

#include "cavity_et/model.hpp"

namespace cavity_et {

template <int N>
using SquareMatrix = Eigen::Matrix<cplx, N, N>;
using Matrix2c = SquareMatrix<2>;
using Matrix3c = SquareMatrix<3>;

/// Eigenvalues above this eigenvector-matrix condition number are treated as an
/// exceptional point.
inline constexpr double kExceptionalPointCondition = 1e12;

/// Biorthogonal eigensystem of a small non-Hermitian matrix.
///
/// Eigenvalues are ordered by descending real part (ties: descending imaginary
/// part). Column i of `right` is the unit-norm right eigenvector for eigenvalue i,
/// row i of `inverse_rows` is the matching inverse bra, so that
/// `inverse_rows * right == I` and `right * inverse_rows == I`.
template <int N>
struct SmallEigensystem {
  std::array<cplx, N> eigenvalues{};
  SquareMatrix<N> right = SquareMatrix<N>::Zero();
  SquareMatrix<N> inverse_rows = SquareMatrix<N>::Zero();
  double condition = 1.0;  ///< Frobenius condition number of `right`
};

SmallEigensystem<2> solve_small_nonhermitian(const Matrix2c& matrix);
SmallEigensystem<3> solve_small_nonhermitian(const Matrix3c& matrix);

/// Dark-state families |k+>, |k->. Index 0 is the family with the larger real
/// energy. Amplitudes are (D, A) per column. Independent of the ground count.
struct DarkEigensystem {
  SmallEigensystem<2> eig;

  cplx energy(int family) const { return eig.eigenvalues[static_cast<std::size_t>(family)]; }
  cplx donor_amplitude(int family) const { return eig.right(0, family); }
  cplx acceptor_amplitude(int family) const { return eig.right(1, family); }
};

/// Bright states |+>, |X>, |-> (indices 0, 1, 2). Amplitudes per column are
/// (photon, symmetric donor, symmetric acceptor).
struct BrightEigensystem {
  SmallEigensystem<3> eig;
  std::int64_t ground_count = 0;

  cplx energy(int state) const { return eig.eigenvalues[static_cast<std::size_t>(state)]; }
};

inline constexpr int kUpperPolariton = 0;
inline constexpr int kMiddleState = 1;
inline constexpr int kLowerPolariton = 2;

/// Single-pair excited block [[-i Gamma/2, V], [V, Delta - i eta/2]].
Matrix2c dark_block_matrix(const ModelParams& params);

/// Single-excitation block in the basis {|G_c,1ph>, symmetric |D>, symmetric |A>}.
Matrix3c bright_block_matrix(const ModelParams& params, std::int64_t ground_count);

DarkEigensystem dark_block(const ModelParams& params);
BrightEigensystem bright_block(const ModelParams& params, std::int64_t ground_count);

}  // namespace cavity_et
