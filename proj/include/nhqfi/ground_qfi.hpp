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

#include <vector>

#include "nhqfi/model.hpp"

namespace nhqfi {

/// Unnormalized right eigenvector (u, v) of a block for the energy -eps,
/// together with its Dirac norm |u|^2 + |v|^2.
struct BlockGroundState {
  cplx u;
  cplx v;
  double dirac_norm = 0.0;
  cplx energy;

  /// Normalized 2-vector.
  std::array<cplx, 2> normalized() const;
};

enum class Branch { Real, Imaginary };

std::string_view to_string(Branch branch);

struct BlockQfi {
  double value = 0.0;
  Branch branch = Branch::Real;
  bool near_singular = false;
};

struct ModeContribution {
  int index = 0;
  double phi = 0.0;
  Branch branch = Branch::Real;
  double value = 0.0;
  bool near_singular = false;
};

struct QfiRecord {
  double total = 0.0;
  std::vector<ModeContribution> per_mode;  // ascending p
  ModelParams params;
  bool near_singular = false;  // any mode flagged
};

/// Throws DefectiveModeError on a defective block.
BlockGroundState block_ground_state(const ModelParams& params, const MomentumMode& mode);

/// sin^2(phi) (gamma^2-K^2)^2 / [eps^2 (gamma g + eps K)^2] for eps^2 > 0.
/// Throws BranchError on the imaginary branch, DefectiveModeError at eps = 0.
BlockQfi block_qfi_real(const ModelParams& params, const MomentumMode& mode);

/// (gamma^2-K^2) / (-eps^2 gamma^2) for eps^2 < 0.
BlockQfi block_qfi_imag(const ModelParams& params, const MomentumMode& mode);

/// Dispatches on the sign of eps^2.
BlockQfi block_qfi(const ModelParams& params, const MomentumMode& mode);

/// Ground-state QFI with respect to h, summed over all momentum blocks in
/// ascending order with compensated accumulation. O(N).
QfiRecord ground_qfi(const ModelParams& params);

enum class AsymptoticRegime { CriticalUnbroken, Exceptional, NearDegenerate };

/// Leading-order dominant-mode prediction:
///   CriticalUnbroken  (K > gamma, h = 1):   (N/pi)^2 / K^2
///   Exceptional       (K < gamma, h = h_e): (N/pi)^2 / (gamma^2 - K^2)
///   NearDegenerate    (|K - gamma| = kappa, h = 1): 16 kappa^2 (N/pi)^6
/// The near-degenerate form throws WindowError when pi/N <= 10 |kappa|.
double asymptotic_qfi(const ModelParams& params, AsymptoticRegime regime);

}  // namespace nhqfi
