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

#include <array>
#include <complex>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace nhqfi {

using cplx = std::complex<double>;

/// Physical point of the non-Hermitian XY chain with KSEA exchange.
///
///   H = sum_j (1+i gamma)/4 XX + (1-i gamma)/4 YY + K/4 (XY + YX) + h/2 Z_j
///
/// on a periodic ring of `n_sites` spins. Every computation in the library is
/// a pure function of this struct.
struct ModelParams {
  double h = 1.0;
  double gamma = 0.0;
  double k_ksea = 0.0;
  int n_sites = 4;

  /// Throws ParameterError unless N is even and >= 4 and all fields finite.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

/// One antiperiodic momentum pair (p, -p); phi = (2p-1) pi / N.
struct MomentumMode {
  int index = 1;
  double phi = 0.0;
};

/// Entries of the 2x2 pair-space operator [[-g, -alpha_plus], [alpha_minus, g]]
/// in the basis {|0>, c_p^dag c_-p^dag |0>}.
struct BlockOperator {
  double g = 0.0;
  double alpha_plus = 0.0;
  double alpha_minus = 0.0;
  double eps_sq = 0.0;  // g^2 - alpha_plus * alpha_minus

  /// Dense form of the block (row-major 2x2).
  std::array<std::array<double, 2>, 2> matrix() const {
    return {{{-g, -alpha_plus}, {alpha_minus, g}}};
  }
};

/// eps^2 of a block and the selected root. Re eps >= 0 on the real branch,
/// Im eps <= 0 on the imaginary branch, so that -eps carries the largest
/// imaginary part. eps is exactly zero on a defective block.
struct Dispersion {
  double eps_sq = 0.0;
  cplx eps{0.0, 0.0};
  bool defective = false;
};

enum class Phase { Unbroken, Broken, ExceptionalPoint, ExceptionalLine };

std::string_view to_string(Phase phase);

struct PhaseInfo {
  Phase phase = Phase::Unbroken;
  bool at_critical = false;  // |h| == h_c within 1e-12
  double h_c = 1.0;
  std::optional<double> h_e;  // sqrt(h_tilde), present iff K <= gamma
  double h_tilde = 1.0;       // 1 + gamma^2 - K^2
  std::optional<double> omega_c;
  std::optional<std::pair<double, double>> omega_pm;  // ascending
};

/// Zeros of eps^2(omega) on [0, pi]. Exactly one of the members is set.
struct ZeroCrossings {
  std::optional<double> omega_c;                       // double zero at h = h_e
  std::optional<std::pair<double, double>> omega_pm;  // eps^2 < 0 strictly between
};

inline constexpr double kCriticalField = 1.0;
inline constexpr double kCriticalTolerance = 1e-12;
inline constexpr double kExceptionalRelTolerance = 1e-12;

std::vector<MomentumMode> momentum_grid(const ModelParams& params);

/// Mode p of an N-site ring without building the whole grid.
MomentumMode momentum_mode(int n_sites, int index);

/// The block nearest phi = pi, i.e. p = N/2.
MomentumMode mode_nearest_pi(int n_sites);

BlockOperator block_operator(const ModelParams& params, const MomentumMode& mode);
BlockOperator block_operator(const ModelParams& params, double phi);

/// Defective test on block entries: |eps^2| <= 1e-12 max(1, g^2, |a+ a-|).
bool is_defective(const BlockOperator& block);

Dispersion dispersion(const ModelParams& params, const MomentumMode& mode);
Dispersion dispersion(const BlockOperator& block);

/// (h + cos phi)^2 + (K^2 - gamma^2) sin^2 phi, evaluated term by term.
double dispersion_formula(double h, double gamma, double k_ksea, double phi);

PhaseInfo classify_phase(const ModelParams& params);

std::optional<ZeroCrossings> zero_crossings(const ModelParams& params);

/// Anisotropy of the Hermitian XY chain sharing this dispersion:
/// gamma' = sqrt(K^2 - gamma^2). Throws DomainError unless K > gamma.
double hermitian_equivalent(const ModelParams& params);

/// Dispersion of the Hermitian XY chain with anisotropy gamma_xy.
double xy_dispersion(double h, double gamma_xy, double phi);

}  // namespace nhqfi
