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
#include <vector>

#include "nhqfi/model.hpp"

namespace nhqfi {

using Mat2c = Eigen::Matrix2cd;
using Vec2c = Eigen::Vector2cd;

/// exp(-i H_p t) = c0(z) I - i t c1(z) H_p with z = eps^2 t^2,
/// c0(z) = cos sqrt(z) and c1(z) = sin sqrt(z) / sqrt(z). Both are entire in
/// z, so the propagator never needs a branch of eps.
struct BlockPropagator {
  Mat2c matrix;
  double t = 0.0;
  double eps_sq = 0.0;
};

struct EvolvedBlockState {
  Vec2c state;               // unit norm
  double norm_factor = 1.0;  // 1 / raw_norm
  double raw_norm = 1.0;     // ||U(t) |0>||
};

struct DynQfiSeries {
  std::vector<double> times;
  std::vector<double> values;
  ModelParams params;
};

enum class DerivativeMode { Analytic, FiniteDifference };

struct DynamicsOptions {
  DerivativeMode derivative = DerivativeMode::Analytic;
  double fd_step = 1e-6;  // only used for DerivativeMode::FiniteDifference
};

/// Entire functions of z used by the propagator and their z-derivatives.
struct PropagatorCoefficients {
  double c0 = 1.0;
  double c1 = 1.0;
  double dc0 = -0.5;
  double dc1 = -1.0 / 6.0;
};

/// Throws OverflowError when sqrt(-z) exceeds the double range of cosh.
PropagatorCoefficients propagator_coefficients(double z);

/// 2x2 block matrix with entries from block_operator().
Mat2c block_matrix(const BlockOperator& block);

BlockPropagator block_propagator(const ModelParams& params, const MomentumMode& mode, double t);

/// d/dh of U_p(t); only g_p depends on h, so d(eps^2)/dh = 2 g and
/// dH_p/dh = diag(-1, 1).
Mat2c propagator_derivative(const ModelParams& params, const MomentumMode& mode, double t,
                            const DynamicsOptions& options = {});

/// Normalized U_p(t) [1, 0]^T.
EvolvedBlockState evolve_block(const ModelParams& params, const MomentumMode& mode, double t);

/// QFI of one evolved block,
///   4 A^2 ( <0| dU^dag dU |0> - A^2 |<0| U^dag dU |0>|^2 ),  A = 1/||U|0>||.
/// Negative rounding noise is clamped; anything beyond that throws
/// ConsistencyError.
double block_dynamical_qfi(const ModelParams& params, const MomentumMode& mode, double t,
                           const DynamicsOptions& options = {});

/// Sum of block_dynamical_qfi over the momentum grid, ascending p.
double dynamical_qfi(const ModelParams& params, double t, const DynamicsOptions& options = {});

/// dynamical_qfi on every point of a sorted, nonnegative time grid.
DynQfiSeries qfi_time_series(const ModelParams& params, const std::vector<double>& times,
                             const DynamicsOptions& options = {});

}  // namespace nhqfi
