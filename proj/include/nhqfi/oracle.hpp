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

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "nhqfi/model.hpp"

// Brute-force reference computations on the full 2^N spin space. Everything
// here is independent of the momentum-block formulas and is meant for small N.
//
// Basis convention: bit j of a basis index is 1 when spin j points up
// (sigma^z_j = +1). Index 0 (all spins down) is the fermionic vacuum.

namespace nhqfi::oracle {

using VecXc = Eigen::VectorXcd;
using MatXc = Eigen::MatrixXcd;

inline constexpr int kMaxDenseSites = 14;
inline constexpr int kMaxEvolutionSites = 12;

struct DenseOperator {
  int n_sites = 0;
  std::int64_t dim = 0;
  MatXc entries;
};

struct SpectralDecomposition {
  std::vector<cplx> eigenvalues;
  std::vector<VecXc> right_eigenvectors;  // full-space, unit Dirac norm
  std::vector<int> parity_labels;         // +1 even, -1 odd
};

struct DenseGroundState {
  VecXc vector;  // full space, unit norm, largest component real positive
  cplx eigenvalue;
};

/// Sum over the ring of the four coupling terms plus the h/2 field.
/// Throws CapacityError for N > 14.
DenseOperator dense_hamiltonian(const ModelParams& params);

/// Prod_j sigma^z_j as a diagonal of +-1.
std::vector<int> parity_diagonal(int n_sites);

/// Basis indices of the even (+1) or odd (-1) parity sector, ascending.
std::vector<std::int64_t> sector_indices(int n_sites, int parity);

MatXc restrict_to_sector(const DenseOperator& op, const std::vector<std::int64_t>& indices);

/// ||[H, Pi]|| in Frobenius norm.
double parity_commutator_norm(const DenseOperator& op);

/// Sector-by-sector eigendecomposition with residual checks
/// ||Hv - lambda v|| <= 1e-8 ||H||; throws DefectiveModeError on failure.
SpectralDecomposition spectral_decomposition(const DenseOperator& op);

/// Eigenvalues of the even sector only.
std::vector<cplx> even_sector_eigenvalues(const ModelParams& params);

/// Selected state in the even sector: lowest real part when the sector
/// spectrum is real, otherwise largest imaginary part (ties by lowest real
/// part).
DenseGroundState spectral_ground_state(const ModelParams& params);

/// Gauge-aligned central-difference QFI from states at h - d, h, h + d.
/// Each side state is rotated by the unit phase that makes its overlap with
/// `center` real positive. Throws LevelCrossingError if
/// |<minus|plus>| < 0.99.
double fd_qfi(const VecXc& minus, const VecXc& center, const VecXc& plus, double step);

double fd_qfi_ground(const ModelParams& params, double step = 1e-5);

/// Dense time evolution of the vacuum with exp(-i H t / scale), normalized at
/// each h, then the same finite-difference QFI. N <= 12.
double dense_evolution_qfi(const ModelParams& params, double t, double step = 1e-5,
                           double scale = 1.0);

/// Normalized evolved vacuum (full-space vector) and the raw norm before
/// normalization.
struct DenseEvolvedState {
  VecXc vector;
  double raw_norm = 1.0;
};
DenseEvolvedState dense_evolve_vacuum(const ModelParams& params, double t, double scale = 1.0);

/// Finite-difference QFI of the 2x2 block state chosen by a generic complex
/// eigensolver with the same selection rule as spectral_ground_state.
double block_fd_qfi(const ModelParams& params, const MomentumMode& mode, double step = 1e-6);

/// Even-sector many-body energies generated by the block dispersions: every
/// pair contributes +eps, -eps, or 0 (twice, singly occupied), with an even
/// number of singly occupied pairs.
std::vector<cplx> block_spectrum_multiset(const ModelParams& params);

/// Largest distance between `dense` and `scale * predicted` after greedy
/// nearest-neighbour matching. Returns +inf if sizes differ.
double spectrum_mismatch(const std::vector<cplx>& dense, const std::vector<cplx>& predicted,
                         double scale);

/// Least-squares scale s with dense ~= s * block energies, from sorted moduli.
double calibrate_scale(const ModelParams& params);

}  // namespace nhqfi::oracle
