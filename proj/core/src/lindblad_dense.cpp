#include "cavity_et/lindblad_dense.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace cavity_et {

namespace {

using Eigen::Index;

enum Level : int { kG = 0, kD = 1, kA = 2, kF = 3 };

struct Basis {
  int n = 0;
  Index dim = 0;
  Index photon_place = 0;
  std::vector<int> level_of;  // level of pair k in state s: level_of[s * n + k]

  int level(Index s, int k) const { return level_of[static_cast<std::size_t>(s * n + k)]; }
  int photon(Index s) const { return s >= photon_place ? 1 : 0; }
  Index place(int k) const { return Index{1} << (2 * k); }
  int count(Index s, int lvl) const {
    int c = 0;
    for (int k = 0; k < n; ++k) c += level(s, k) == lvl;
    return c;
  }
  int excitations(Index s) const { return count(s, kD) + count(s, kA) + photon(s); }
  int final_mask(Index s) const {
    int mask = 0;
    for (int k = 0; k < n; ++k)
      if (level(s, k) == kF) mask |= 1 << k;
    return mask;
  }
};

/// A jump operator as a partial map on basis states with unit amplitude.
struct Jump {
  double rate = 0.0;
  std::vector<Index> target;  // -1 where the operator annihilates the state
};

}  // namespace

DensePopulations dense_lindblad_integrate(const ModelParams& p_in, std::span<const double> t_grid) {
  const ModelParams p = validate(p_in);
  if (p.n_pairs > kDenseLindbladMaxPairs) {
    std::ostringstream msg;
    msg << "dense master equation supports at most " << kDenseLindbladMaxPairs << " pairs, got "
        << p.n_pairs;
    throw DimensionError(msg.str());
  }
  Basis basis;
  basis.n = static_cast<int>(p.n_pairs);
  basis.photon_place = Index{1} << (2 * basis.n);
  basis.dim = 2 * basis.photon_place;
  basis.level_of.resize(static_cast<std::size_t>(basis.dim * basis.n));
  for (Index s = 0; s < basis.dim; ++s)
    for (int k = 0; k < basis.n; ++k)
      basis.level_of[static_cast<std::size_t>(s * basis.n + k)] =
          static_cast<int>((s >> (2 * k)) & 3);

  // Hamiltonian (real symmetric in this basis).
  Eigen::MatrixXd ham = Eigen::MatrixXd::Zero(basis.dim, basis.dim);
  for (Index s = 0; s < basis.dim; ++s) {
    for (int k = 0; k < basis.n; ++k) {
      const Index place = basis.place(k);
      switch (basis.level(s, k)) {
        case kG:
          if (basis.photon(s)) ham(s - basis.photon_place + place, s) = p.coupling;
          break;
        case kD:
          if (!basis.photon(s)) ham(s + basis.photon_place - place, s) = p.coupling;
          ham(s + place, s) = p.tunneling;
          break;
        case kA:
          ham(s, s) += p.detuning;
          ham(s - place, s) = p.tunneling;
          break;
        default: break;
      }
    }
  }

  std::vector<Jump> jumps;
  auto add_jump = [&](double rate, auto&& map) {
    Jump j{rate, std::vector<Index>(static_cast<std::size_t>(basis.dim), -1)};
    for (Index s = 0; s < basis.dim; ++s) j.target[static_cast<std::size_t>(s)] = map(s);
    jumps.push_back(std::move(j));
  };
  add_jump(p.cavity_decay, [&](Index s) { return basis.photon(s) ? s - basis.photon_place : Index{-1}; });
  add_jump(p.cavity_pump, [&](Index s) { return basis.photon(s) ? Index{-1} : s + basis.photon_place; });
  for (int k = 0; k < basis.n; ++k) {
    const Index place = basis.place(k);
    add_jump(p.pair_decay, [&](Index s) { return basis.level(s, k) == kD ? s - place : Index{-1}; });
    add_jump(p.pair_pump, [&](Index s) { return basis.level(s, k) == kG ? s + place : Index{-1}; });
    add_jump(p.acceptor_relaxation, [&](Index s) { return basis.level(s, k) == kA ? s + place : Index{-1}; });
  }

  // Invariant subspace of density-matrix entries.
  std::vector<Index> slot(static_cast<std::size_t>(basis.dim * basis.dim), -1);
  std::vector<std::pair<Index, Index>> entries;
  for (Index a = 0; a < basis.dim; ++a)
    for (Index b = 0; b < basis.dim; ++b)
      if (basis.final_mask(a) == basis.final_mask(b) && basis.excitations(a) == basis.excitations(b)) {
        slot[static_cast<std::size_t>(a * basis.dim + b)] = static_cast<Index>(entries.size());
        entries.emplace_back(a, b);
      }
  const auto size = static_cast<Index>(entries.size());

  std::vector<double> loss(static_cast<std::size_t>(basis.dim), 0.0);  // sum_k rate_k <s|L^dag L|s>
  for (const auto& j : jumps)
    for (Index s = 0; s < basis.dim; ++s)
      if (j.target[static_cast<std::size_t>(s)] >= 0) loss[static_cast<std::size_t>(s)] += j.rate;

  const cplx i_unit(0.0, 1.0);
  Eigen::MatrixXcd generator = Eigen::MatrixXcd::Zero(size, size);
  auto deposit = [&](Index col, Index a, Index b, cplx value) {
    const Index row = slot[static_cast<std::size_t>(a * basis.dim + b)];
    if (row < 0) throw std::logic_error("master-equation generator leaves its invariant subspace");
    generator(row, col) += value;
  };
  for (Index col = 0; col < size; ++col) {
    const auto [a, b] = entries[static_cast<std::size_t>(col)];
    for (Index c = 0; c < basis.dim; ++c) {
      if (ham(c, a) != 0.0) deposit(col, c, b, -i_unit * ham(c, a));
      if (ham(b, c) != 0.0) deposit(col, a, c, i_unit * ham(b, c));
    }
    for (const auto& j : jumps) {
      const Index ta = j.target[static_cast<std::size_t>(a)];
      const Index tb = j.target[static_cast<std::size_t>(b)];
      if (ta >= 0 && tb >= 0 && j.rate != 0.0) deposit(col, ta, tb, j.rate);
    }
    deposit(col, a, b, -0.5 * (loss[static_cast<std::size_t>(a)] + loss[static_cast<std::size_t>(b)]));
  }

  Eigen::VectorXcd rho = Eigen::VectorXcd::Zero(size);
  rho(slot[0]) = 1.0;  // all pairs in |G>, no photon (full index 0)

  DensePopulations out;
  out.t_grid.assign(t_grid.begin(), t_grid.end());
  out.generator_dimension = size;
  out.min_eigenvalue = 1.0;
  double t_prev = 0.0;
  for (const double t : t_grid) {
    if (t < t_prev) throw DomainError("time grid must be non-decreasing");
    if (t > t_prev) {
      const Eigen::MatrixXcd step = (generator * (t - t_prev)).exp();
      rho = step * rho;
      t_prev = t;
    }
    Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(basis.dim, basis.dim);
    for (Index e = 0; e < size; ++e) full(entries[static_cast<std::size_t>(e)].first, entries[static_cast<std::size_t>(e)].second) = rho(e);
    double n_g = 0.0, n_f = 0.0, n_e = 0.0, trace = 0.0;
    for (Index s = 0; s < basis.dim; ++s) {
      const double w = full(s, s).real();
      trace += w;
      n_g += w * basis.count(s, kG);
      n_f += w * basis.count(s, kF);
      n_e += w * basis.excitations(s);
    }
    out.mean_NG.push_back(n_g);
    out.mean_NF.push_back(n_f);
    out.mean_Ne.push_back(n_e);
    out.max_trace_error = std::max(out.max_trace_error, std::abs(trace - 1.0));
    out.max_hermiticity_error =
        std::max(out.max_hermiticity_error, (full - full.adjoint()).cwiseAbs().maxCoeff());
    const Eigen::MatrixXcd herm = 0.5 * (full + full.adjoint());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = std::min(out.min_eigenvalue, eig.eigenvalues().minCoeff());
  }
  return out;
}

}  // namespace cavity_et
