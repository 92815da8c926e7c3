#include "cavity_et/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/LU>

namespace cavity_et {

namespace {

// Eigenvalues closer than this (relative to the matrix scale) are handled as one
// degenerate cluster whose eigenvectors come from a joint null space.
constexpr double kClusterTolerance = 1e-7;
// Real parts closer than this (relative) count as a tie for ordering.
constexpr double kOrderingTieTolerance = 1e-13;

template <int N>
using Vector = Eigen::Matrix<cplx, N, 1>;

template <int N>
double scale_of(const SquareMatrix<N>& a) {
  return a.cwiseAbs().maxCoeff();
}

std::array<cplx, 2> quadratic_roots(const Matrix2c& a) {
  const cplx mean = 0.5 * (a(0, 0) + a(1, 1));
  const cplx half_diff = 0.5 * (a(0, 0) - a(1, 1));
  const cplx root = std::sqrt(half_diff * half_diff + a(0, 1) * a(1, 0));
  return {mean + root, mean - root};
}

struct Cubic {
  cplx c2, c1, c0;  // lambda^3 + c2 lambda^2 + c1 lambda + c0

  cplx value(cplx x) const { return ((x + c2) * x + c1) * x + c0; }
  cplx slope(cplx x) const { return (3.0 * x + 2.0 * c2) * x + c1; }
};

Cubic characteristic_polynomial(const Matrix3c& a) {
  const cplx trace = a.trace();
  const cplx minors = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) +
                      (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) +
                      (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1));
  return {-trace, minors, -a.determinant()};
}

std::array<cplx, 3> cubic_roots(const Cubic& poly) {
  // Depressed cubic x^3 + p x + q with lambda = x - c2/3, solved by Cardano.
  const cplx c2 = poly.c2;
  const cplx shift = -c2 / 3.0;
  const cplx p = poly.c1 - c2 * c2 / 3.0;
  const cplx q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * poly.c1 / 3.0 + poly.c0;
  const cplx disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  cplx u3 = -0.5 * q + disc;
  if (const cplx alt = -0.5 * q - disc; std::abs(alt) > std::abs(u3)) {
    u3 = alt;
  }
  std::array<cplx, 3> roots{shift, shift, shift};
  if (std::abs(u3) == 0.0) {
    return roots;  // p = q = 0: triple root
  }
  const cplx omega(-0.5, 0.5 * std::sqrt(3.0));
  cplx u = std::pow(u3, 1.0 / 3.0);
  for (auto& root : roots) {
    root += u - p / (3.0 * u);
    u *= omega;
  }
  // Newton polish against the cubic; keep a step only if it lowers |f|.
  for (auto& root : roots) {
    for (int iter = 0; iter < 3; ++iter) {
      const cplx f = poly.value(root);
      const cplx df = poly.slope(root);
      if (std::abs(df) == 0.0) break;
      const cplx candidate = root - f / df;
      if (!(std::abs(poly.value(candidate)) < std::abs(f))) break;
      root = candidate;
    }
  }
  return roots;
}

template <int N>
std::array<cplx, N> raw_eigenvalues(const SquareMatrix<N>& a) {
  if constexpr (N == 2) {
    return quadratic_roots(a);
  } else {
    return cubic_roots(characteristic_polynomial(a));
  }
}

// Null-space basis of b, treating pivots below `threshold` as zero.
template <int N>
std::vector<Vector<N>> null_space(const SquareMatrix<N>& b, double threshold) {
  std::vector<Vector<N>> basis;
  const double max_entry = scale_of<N>(b);
  if (max_entry <= threshold) {
    for (int i = 0; i < N; ++i) basis.push_back(Vector<N>::Unit(i));
    return basis;
  }
  Eigen::FullPivLU<SquareMatrix<N>> lu(b);
  lu.setThreshold(threshold / max_entry);
  const auto kernel = lu.kernel();
  if (lu.rank() == N) return basis;
  for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
    Vector<N> v = kernel.col(c);
    basis.push_back(v / v.norm());
  }
  // Orthonormalize (Gram-Schmidt) so degenerate eigenvectors are well separated.
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) basis[i] -= basis[j].dot(basis[i]) * basis[j];
    basis[i].normalize();
  }
  return basis;
}

// One inverse-iteration step towards the eigenvector of `shift`, followed by
// the residual-minimizing eigenvalue estimate.
template <int N>
void polish(const SquareMatrix<N>& a, double scale, cplx& eigenvalue, Vector<N>& vec) {
  const double eps = std::numeric_limits<double>::epsilon();
  const cplx shift = eigenvalue + cplx(eps * scale, eps * scale);
  SquareMatrix<N> b = a - shift * SquareMatrix<N>::Identity();
  Vector<N> w = Eigen::PartialPivLU<SquareMatrix<N>>(b).solve(vec);
  const double norm = w.norm();
  if (std::isfinite(norm) && norm > 0.0) {
    vec = w / norm;
  }
  const cplx rayleigh = vec.dot(a * vec);  // vec is unit norm; dot conjugates the left side
  const double before = (a * vec - eigenvalue * vec).norm();
  const double after = (a * vec - rayleigh * vec).norm();
  if (std::isfinite(after) && after <= before) eigenvalue = rayleigh;
}

template <int N>
void fix_phase(Vector<N>& v) {
  Eigen::Index largest = 0;
  v.cwiseAbs().maxCoeff(&largest);
  const cplx pivot = v(largest);
  if (std::abs(pivot) > 0.0) v *= std::conj(pivot) / std::abs(pivot);
  v(largest) = cplx(v(largest).real(), 0.0);
}

template <int N>
double min_gap(const std::array<cplx, N>& values) {
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) gap = std::min(gap, std::abs(values[i] - values[j]));
  return gap;
}

template <int N>
[[noreturn]] void throw_exceptional(const std::array<cplx, N>& values, double condition,
                                    const char* reason) {
  std::ostringstream msg;
  msg.precision(6);
  msg << "exceptional point: " << reason << " (eigenvalue gap " << min_gap<N>(values)
      << ", condition " << condition << ")";
  throw ExceptionalPointError(msg.str(), min_gap<N>(values), condition);
}

template <int N>
SmallEigensystem<N> solve(const SquareMatrix<N>& a) {
  if (!a.allFinite()) {
    throw DomainError("eigenproblem matrix contains non-finite entries");
  }
  SmallEigensystem<N> out;
  const double scale = scale_of<N>(a);
  if (scale == 0.0) {
    out.right.setIdentity();
    out.inverse_rows.setIdentity();
    out.condition = N;
    return out;
  }

  std::array<cplx, N> values = raw_eigenvalues<N>(a);

  // Group eigenvalues into clusters of (numerically) coincident values.
  std::array<int, N> cluster{};
  cluster.fill(-1);
  int n_clusters = 0;
  for (int i = 0; i < N; ++i) {
    if (cluster[i] >= 0) continue;
    cluster[i] = n_clusters;
    for (int j = i + 1; j < N; ++j)
      if (cluster[j] < 0 && std::abs(values[i] - values[j]) <= kClusterTolerance * scale)
        cluster[j] = n_clusters;
    ++n_clusters;
  }

  std::array<Vector<N>, N> vectors;
  for (int c = 0; c < n_clusters; ++c) {
    std::vector<int> members;
    cplx mean = 0.0;
    for (int i = 0; i < N; ++i)
      if (cluster[i] == c) {
        members.push_back(i);
        mean += values[i];
      }
    mean /= static_cast<double>(members.size());
    const auto basis = null_space<N>(a - mean * SquareMatrix<N>::Identity(),
                                     kClusterTolerance * scale);
    if (basis.size() < members.size()) {
      throw_exceptional<N>(values, std::numeric_limits<double>::infinity(),
                           "defective eigenvalue cluster");
    }
    if (members.size() == 1) {
      const int i = members.front();
      vectors[i] = basis.front();
      polish<N>(a, scale, values[i], vectors[i]);
    } else {
      for (std::size_t k = 0; k < members.size(); ++k) {
        values[members[k]] = mean;
        vectors[members[k]] = basis[k];
      }
    }
  }

  // Order by descending real part, ties by descending imaginary part.
  std::array<int, N> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int l, int r) {
    const double dre = values[l].real() - values[r].real();
    if (std::abs(dre) > kOrderingTieTolerance * scale) return dre > 0.0;
    return values[l].imag() > values[r].imag();
  });

  for (int k = 0; k < N; ++k) {
    out.eigenvalues[k] = values[order[k]];
    Vector<N> v = vectors[order[k]];
    fix_phase<N>(v);
    out.right.col(k) = v;
  }

  SquareMatrix<N> inverse = out.right.inverse();
  const SquareMatrix<N> identity = SquareMatrix<N>::Identity();
  inverse += inverse * (identity - out.right * inverse);  // one Newton-Schulz refinement
  out.inverse_rows = inverse;
  out.condition = out.right.norm() * inverse.norm();
  if (!std::isfinite(out.condition) || out.condition > kExceptionalPointCondition) {
    throw_exceptional<N>(out.eigenvalues, out.condition, "ill-conditioned eigenvector matrix");
  }
  return out;
}

}  // namespace

SmallEigensystem<2> solve_small_nonhermitian(const Matrix2c& matrix) { return solve<2>(matrix); }
SmallEigensystem<3> solve_small_nonhermitian(const Matrix3c& matrix) { return solve<3>(matrix); }

Matrix2c dark_block_matrix(const ModelParams& p) {
  const cplx i(0.0, 1.0);
  Matrix2c m;
  m << -0.5 * i * p.pair_decay, p.tunneling,
       p.tunneling, p.detuning - 0.5 * i * p.acceptor_relaxation;
  return m;
}

Matrix3c bright_block_matrix(const ModelParams& p, std::int64_t ground_count) {
  if (ground_count < 1) {
    throw DomainError("bright block needs at least one ground-state pair");
  }
  const cplx i(0.0, 1.0);
  const double g_c = collective_coupling(p, ground_count);
  Matrix3c m;
  m << -0.5 * i * p.cavity_decay, g_c, 0.0,
       g_c, -0.5 * i * p.pair_decay, p.tunneling,
       0.0, p.tunneling, p.detuning - 0.5 * i * p.acceptor_relaxation;
  return m;
}

DarkEigensystem dark_block(const ModelParams& params) {
  return DarkEigensystem{solve_small_nonhermitian(dark_block_matrix(params))};
}

BrightEigensystem bright_block(const ModelParams& params, std::int64_t ground_count) {
  return BrightEigensystem{solve_small_nonhermitian(bright_block_matrix(params, ground_count)),
                           ground_count};
}

}  // namespace cavity_et
