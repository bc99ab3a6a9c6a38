// Copyright 2026 The nhqfi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nhqfi/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>

#include "nhqfi/errors.hpp"

namespace nhqfi::oracle {

namespace {

const cplx kI{0.0, 1.0};
constexpr double kRealSpectrumTol = 1e-8;
constexpr double kResidualTol = 1e-8;

// sigma^y on a single spin: |up> -> i|down>, |down> -> -i|up>
cplx sigma_y_phase(bool up) { return up ? kI : -kI; }

void require_sites(int n_sites, int cap) {
  if (n_sites > cap) {
    throw CapacityError("dense oracle limited to N <= " + std::to_string(cap) + ", got " +
                        std::to_string(n_sites));
  }
}

// Index of the selected eigenvalue under the max-imaginary-part rule.
std::size_t select_ground(const std::vector<cplx>& ev) {
  double max_abs_im = 0.0;
  for (const cplx& z : ev) max_abs_im = std::max(max_abs_im, std::abs(z.imag()));
  std::size_t best = 0;
  if (max_abs_im <= kRealSpectrumTol) {
    for (std::size_t i = 1; i < ev.size(); ++i) {
      if (ev[i].real() < ev[best].real()) best = i;
    }
    return best;
  }
  double max_im = -std::numeric_limits<double>::infinity();
  for (const cplx& z : ev) max_im = std::max(max_im, z.imag());
  bool found = false;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (ev[i].imag() < max_im - kRealSpectrumTol) continue;
    if (!found || ev[i].real() < ev[best].real()) {
      best = i;
      found = true;
    }
  }
  return best;
}

template <typename Vec>
void fix_gauge_largest(Vec& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const cplx c = v(imax);
  if (std::abs(c) > 0.0) v *= std::conj(c) / std::abs(c);
}

template <typename Vec>
Vec align_to(const Vec& center, Vec x) {
  const cplx ov = center.dot(x);  // <center|x>
  if (std::abs(ov) < 1e-3) {
    fix_gauge_largest(x);
    return x;
  }
  return x * (std::conj(ov) / std::abs(ov));
}

template <typename Vec>
double fd_qfi_impl(const Vec& minus, const Vec& center, const Vec& plus, double step) {
  if (std::abs(minus.dot(plus)) < 0.99) {
    throw LevelCrossingError(
        "selected state changes between h - d and h + d; reduce the finite-difference step");
  }
  const Vec m = align_to(center, minus);
  const Vec p = align_to(center, plus);
  const Vec d = (p - m) / (2.0 * step);
  const double dd = d.squaredNorm();
  const double od = std::norm(center.dot(d));
  return 4.0 * (dd - od);
}

VecXc embed(const VecXc& sector_vec, const std::vector<std::int64_t>& idx, std::int64_t dim) {
  VecXc full = VecXc::Zero(dim);
  for (std::size_t i = 0; i < idx.size(); ++i) full(idx[i]) = sector_vec(static_cast<Eigen::Index>(i));
  return full;
}

}  // namespace

DenseOperator dense_hamiltonian(const ModelParams& params) {
  params.validate();
  require_sites(params.n_sites, kMaxDenseSites);
  const int n = params.n_sites;
  const std::int64_t dim = std::int64_t{1} << n;
  DenseOperator op;
  op.n_sites = n;
  op.dim = dim;
  op.entries = MatXc::Zero(dim, dim);

  const cplx xx = (1.0 + kI * params.gamma) / 4.0;
  const cplx yy = (1.0 - kI * params.gamma) / 4.0;
  const double ks = params.k_ksea / 4.0;
  for (std::int64_t s = 0; s < dim; ++s) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      const int k = (j + 1) % n;
      const bool up_j = (s >> j) & 1;
      const bool up_k = (s >> k) & 1;
      diag += (up_j ? 0.5 : -0.5) * params.h;
      const std::int64_t t = s ^ (std::int64_t{1} << j) ^ (std::int64_t{1} << k);
      const cplx yj = sigma_y_phase(up_j);
      const cplx yk = sigma_y_phase(up_k);
      op.entries(t, s) += xx + yy * yj * yk + ks * (yk + yj);
    }
    op.entries(s, s) += diag;
  }
  return op;
}

std::vector<int> parity_diagonal(int n_sites) {
  const std::int64_t dim = std::int64_t{1} << n_sites;
  std::vector<int> d(static_cast<std::size_t>(dim));
  for (std::int64_t s = 0; s < dim; ++s) {
    const int downs = n_sites - std::popcount(static_cast<std::uint64_t>(s));
    d[static_cast<std::size_t>(s)] = downs % 2 == 0 ? 1 : -1;
  }
  return d;
}

std::vector<std::int64_t> sector_indices(int n_sites, int parity) {
  const std::vector<int> d = parity_diagonal(n_sites);
  std::vector<std::int64_t> idx;
  for (std::size_t s = 0; s < d.size(); ++s) {
    if (d[s] == parity) idx.push_back(static_cast<std::int64_t>(s));
  }
  return idx;
}

MatXc restrict_to_sector(const DenseOperator& op, const std::vector<std::int64_t>& indices) {
  const auto m = static_cast<Eigen::Index>(indices.size());
  MatXc out(m, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    for (Eigen::Index r = 0; r < m; ++r) out(r, c) = op.entries(indices[r], indices[c]);
  }
  return out;
}

double parity_commutator_norm(const DenseOperator& op) {
  const std::vector<int> d = parity_diagonal(op.n_sites);
  double acc = 0.0;
  for (std::int64_t c = 0; c < op.dim; ++c) {
    for (std::int64_t r = 0; r < op.dim; ++r) {
      // [H, Pi]_{rc} = H_rc (pi_c - pi_r)
      const double f = d[static_cast<std::size_t>(c)] - d[static_cast<std::size_t>(r)];
      if (f != 0.0) acc += std::norm(op.entries(r, c) * f);
    }
  }
  return std::sqrt(acc);
}

SpectralDecomposition spectral_decomposition(const DenseOperator& op) {
  SpectralDecomposition out;
  const double hnorm = op.entries.norm();
  for (int parity : {1, -1}) {
    const auto idx = sector_indices(op.n_sites, parity);
    const MatXc hs = restrict_to_sector(op, idx);
    Eigen::ComplexEigenSolver<MatXc> solver(hs, true);
    if (solver.info() != Eigen::Success) throw ConsistencyError("eigensolver did not converge");
    for (Eigen::Index i = 0; i < hs.rows(); ++i) {
      const cplx lambda = solver.eigenvalues()(i);
      VecXc v = solver.eigenvectors().col(i);
      v.normalize();
      if ((hs * v - lambda * v).norm() > kResidualTol * std::max(1.0, hnorm)) {
        throw DefectiveModeError("dense eigenvector residual check failed (defective spectrum)",
                                 std::numeric_limits<double>::quiet_NaN());
      }
      out.eigenvalues.push_back(lambda);
      out.right_eigenvectors.push_back(embed(v, idx, op.dim));
      out.parity_labels.push_back(parity);
    }
  }
  return out;
}

std::vector<cplx> even_sector_eigenvalues(const ModelParams& params) {
  const DenseOperator op = dense_hamiltonian(params);
  const MatXc hs = restrict_to_sector(op, sector_indices(op.n_sites, 1));
  Eigen::ComplexEigenSolver<MatXc> solver(hs, false);
  if (solver.info() != Eigen::Success) throw ConsistencyError("eigensolver did not converge");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

DenseGroundState spectral_ground_state(const ModelParams& params) {
  const DenseOperator op = dense_hamiltonian(params);
  const auto idx = sector_indices(op.n_sites, 1);
  const MatXc hs = restrict_to_sector(op, idx);
  Eigen::ComplexEigenSolver<MatXc> solver(hs, true);
  if (solver.info() != Eigen::Success) throw ConsistencyError("eigensolver did not converge");
  const auto& evs = solver.eigenvalues();
  const std::vector<cplx> ev(evs.data(), evs.data() + evs.size());
  const std::size_t g = select_ground(ev);

  VecXc v = solver.eigenvectors().col(static_cast<Eigen::Index>(g));
  v.normalize();
  if ((hs * v - ev[g] * v).norm() > kResidualTol * std::max(1.0, hs.norm())) {
    throw DefectiveModeError("ground-state residual check failed (exceptional point)",
                             std::numeric_limits<double>::quiet_NaN());
  }
  fix_gauge_largest(v);
  return {embed(v, idx, op.dim), ev[g]};
}

double fd_qfi(const VecXc& minus, const VecXc& center, const VecXc& plus, double step) {
  return fd_qfi_impl(minus, center, plus, step);
}

double fd_qfi_ground(const ModelParams& params, double step) {
  ModelParams up = params;
  ModelParams dn = params;
  up.h += step;
  dn.h -= step;
  const VecXc c = spectral_ground_state(params).vector;
  const VecXc p = spectral_ground_state(up).vector;
  const VecXc m = spectral_ground_state(dn).vector;
  return fd_qfi(m, c, p, 0.5 * (up.h - dn.h));
}

DenseEvolvedState dense_evolve_vacuum(const ModelParams& params, double t, double scale) {
  require_sites(params.n_sites, kMaxEvolutionSites);
  if (!(t >= 0.0)) throw ParameterError("time must be >= 0");
  const DenseOperator op = dense_hamiltonian(params);
  const auto idx = sector_indices(op.n_sites, 1);
  const MatXc hs = restrict_to_sector(op, idx);
  const MatXc gen = (-kI * (t / scale)) * hs;
  const MatXc u = gen.exp();
  // index 0 (all spins down) is the first even-sector basis state
  VecXc v = u.col(0);
  if (!v.allFinite()) throw OverflowError("dense evolution overflowed");
  DenseEvolvedState s;
  s.raw_norm = v.norm();
  if (!(s.raw_norm > 0.0)) throw OverflowError("dense evolution norm underflowed");
  s.vector = embed(v / s.raw_norm, idx, op.dim);
  return s;
}

double dense_evolution_qfi(const ModelParams& params, double t, double step, double scale) {
  if (t == 0.0) return 0.0;
  ModelParams up = params;
  ModelParams dn = params;
  up.h += step;
  dn.h -= step;
  const VecXc c = dense_evolve_vacuum(params, t, scale).vector;
  const VecXc p = dense_evolve_vacuum(up, t, scale).vector;
  const VecXc m = dense_evolve_vacuum(dn, t, scale).vector;
  return fd_qfi(m, c, p, 0.5 * (up.h - dn.h));
}

double block_fd_qfi(const ModelParams& params, const MomentumMode& mode, double step) {
  auto state_at = [&](double h) {
    ModelParams q = params;
    q.h = h;
    const BlockOperator b = block_operator(q, mode);
    Eigen::Matrix2cd m;
    m << -b.g, -b.alpha_plus, b.alpha_minus, b.g;
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> solver(m, true);
    const auto& evs = solver.eigenvalues();
    const std::vector<cplx> ev{evs(0), evs(1)};
    Eigen::Vector2cd v = solver.eigenvectors().col(static_cast<Eigen::Index>(select_ground(ev)));
    v.normalize();
    fix_gauge_largest(v);
    return v;
  };
  const double hp = params.h + step;
  const double hm = params.h - step;
  return fd_qfi_impl<Eigen::Vector2cd>(state_at(hm), state_at(params.h), state_at(hp),
                                       0.5 * (hp - hm));
}

std::vector<cplx> block_spectrum_multiset(const ModelParams& params) {
  params.validate();
  std::vector<cplx> eps;
  for (const auto& mode : momentum_grid(params)) {
    eps.push_back(std::sqrt(cplx(block_operator(params, mode).eps_sq, 0.0)));
  }
  std::vector<cplx> out;
  // (energy, number of singly occupied pairs mod 2)
  std::vector<std::pair<cplx, int>> acc{{0.0, 0}};
  for (const cplx& e : eps) {
    std::vector<std::pair<cplx, int>> next;
    next.reserve(acc.size() * 4);
    for (const auto& [energy, odd] : acc) {
      next.emplace_back(energy + e, odd);
      next.emplace_back(energy - e, odd);
      next.emplace_back(energy, odd ^ 1);
      next.emplace_back(energy, odd ^ 1);
    }
    acc = std::move(next);
  }
  for (const auto& [energy, odd] : acc) {
    if (odd == 0) out.push_back(energy);
  }
  return out;
}

double spectrum_mismatch(const std::vector<cplx>& dense, const std::vector<cplx>& predicted,
                         double scale) {
  if (dense.size() != predicted.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(dense.size(), false);
  double worst = 0.0;
  for (const cplx& p : predicted) {
    const cplx target = scale * p;
    std::size_t best = dense.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dense.size(); ++i) {
      if (used[i]) continue;
      const double d = std::abs(dense[i] - target);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

double calibrate_scale(const ModelParams& params) {
  std::vector<cplx> dense = even_sector_eigenvalues(params);
  std::vector<cplx> pred = block_spectrum_multiset(params);
  if (dense.size() != pred.size()) throw ConsistencyError("sector size mismatch");
  std::vector<double> a, b;
  for (const cplx& z : dense) a.push_back(std::abs(z));
  for (const cplx& z : pred) b.push_back(std::abs(z));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += a[i] * b[i];
    den += b[i] * b[i];
  }
  if (den == 0.0) throw DomainError("cannot calibrate scale on an all-zero spectrum");
  return num / den;
}

}  // namespace nhqfi::oracle
