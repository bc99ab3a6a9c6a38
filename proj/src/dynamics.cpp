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

#include "nhqfi/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nhqfi/errors.hpp"
#include "nhqfi/kahan.hpp"

namespace nhqfi {

namespace {

constexpr double kSeriesRadius = 0.5;
constexpr int kSeriesTerms = 14;
// cosh/sinh overflow a little above 709.
constexpr double kMaxGrowthExponent = 700.0;

const cplx kI{0.0, 1.0};

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ParameterError("time must be finite and >= 0");
}

}  // namespace

PropagatorCoefficients propagator_coefficients(double z) {
  PropagatorCoefficients c;
  if (std::abs(z) < kSeriesRadius) {
    // c0 = sum (-z)^k/(2k)!, c1 = sum (-z)^k/(2k+1)!
    double c0 = 0.0, c1 = 0.0, dc0 = 0.0, dc1 = 0.0;
    double pw = 1.0;  // (-z)^k
    double f_even = 1.0;  // (2k)!
    double f_odd = 1.0;   // (2k+1)!
    for (int k = 0; k < kSeriesTerms; ++k) {
      if (k > 0) {
        f_even = f_odd * (2 * k);
        f_odd = f_even * (2 * k + 1);
      }
      c0 += pw / f_even;
      c1 += pw / f_odd;
      if (k + 1 < kSeriesTerms) {
        // d/dz (-z)^(k+1) = -(k+1) (-z)^k
        const double fe = f_odd * (2 * k + 2);
        const double fo = fe * (2 * k + 3);
        dc0 -= (k + 1) * pw / fe;
        dc1 -= (k + 1) * pw / fo;
      }
      pw *= -z;
    }
    c.c0 = c0;
    c.c1 = c1;
    c.dc0 = dc0;
    c.dc1 = dc1;
    return c;
  }
  if (z > 0.0) {
    const double s = std::sqrt(z);
    c.c0 = std::cos(s);
    c.c1 = std::sin(s) / s;
  } else {
    const double s = std::sqrt(-z);
    if (s > kMaxGrowthExponent) {
      std::ostringstream msg;
      msg << "non-unitary growth exp(" << s << ") overflows; log-domain evolution is required";
      throw OverflowError(msg.str());
    }
    c.c0 = std::cosh(s);
    c.c1 = std::sinh(s) / s;
  }
  c.dc0 = -0.5 * c.c1;
  c.dc1 = (c.c0 - c.c1) / (2.0 * z);
  return c;
}

Mat2c block_matrix(const BlockOperator& block) {
  Mat2c m;
  m << -block.g, -block.alpha_plus, block.alpha_minus, block.g;
  return m;
}

BlockPropagator block_propagator(const ModelParams& params, const MomentumMode& mode, double t) {
  check_time(t);
  const BlockOperator b = block_operator(params, mode);
  const PropagatorCoefficients c = propagator_coefficients(b.eps_sq * t * t);
  BlockPropagator u;
  u.t = t;
  u.eps_sq = b.eps_sq;
  u.matrix = c.c0 * Mat2c::Identity() - kI * (t * c.c1) * block_matrix(b);
  if (!u.matrix.allFinite()) throw OverflowError("propagator entries left the double range");
  return u;
}

Mat2c propagator_derivative(const ModelParams& params, const MomentumMode& mode, double t,
                            const DynamicsOptions& options) {
  check_time(t);
  if (options.derivative == DerivativeMode::FiniteDifference) {
    ModelParams up = params;
    ModelParams dn = params;
    up.h += options.fd_step;
    dn.h -= options.fd_step;
    return (block_propagator(up, mode, t).matrix - block_propagator(dn, mode, t).matrix) /
           (up.h - dn.h);
  }
  const BlockOperator b = block_operator(params, mode);
  const PropagatorCoefficients c = propagator_coefficients(b.eps_sq * t * t);
  const double dz = 2.0 * b.g * t * t;
  Mat2c dh_block;
  dh_block << -1.0, 0.0, 0.0, 1.0;
  Mat2c d = (c.dc0 * dz) * Mat2c::Identity() - kI * (t * c.dc1 * dz) * block_matrix(b) -
            kI * (t * c.c1) * dh_block;
  if (!d.allFinite()) throw OverflowError("propagator derivative left the double range");
  return d;
}

EvolvedBlockState evolve_block(const ModelParams& params, const MomentumMode& mode, double t) {
  const BlockPropagator u = block_propagator(params, mode, t);
  const Vec2c raw = u.matrix.col(0);
  EvolvedBlockState s;
  s.raw_norm = raw.norm();
  if (!(s.raw_norm > 0.0) || !std::isfinite(s.raw_norm)) {
    throw OverflowError("evolved block norm is zero or not finite");
  }
  s.norm_factor = 1.0 / s.raw_norm;
  s.state = raw * s.norm_factor;
  return s;
}

double block_dynamical_qfi(const ModelParams& params, const MomentumMode& mode, double t,
                           const DynamicsOptions& options) {
  const EvolvedBlockState s = evolve_block(params, mode, t);
  const Vec2c d_raw = propagator_derivative(params, mode, t, options).col(0);
  // a = A U|0>, b = A dU|0>; both scaled before forming products
  const Vec2c b = d_raw * s.norm_factor;
  const double bb = b.squaredNorm();
  const double ab = std::norm(s.state.dot(b));
  const double f = 4.0 * (bb - ab);
  const double tol = 1e-10 * std::max(1.0, 4.0 * bb);
  if (f < -tol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "negative dynamical QFI " << f << " at phi=" << mode.phi << ", t=" << t;
    throw ConsistencyError(msg.str());
  }
  return std::max(f, 0.0);
}

double dynamical_qfi(const ModelParams& params, double t, const DynamicsOptions& options) {
  params.validate();
  check_time(t);
  KahanSum sum;
  for (int p = 1; p <= params.n_sites / 2; ++p) {
    sum.add(block_dynamical_qfi(params, momentum_mode(params.n_sites, p), t, options));
  }
  return sum.value();
}

DynQfiSeries qfi_time_series(const ModelParams& params, const std::vector<double>& times,
                             const DynamicsOptions& options) {
  params.validate();
  if (!std::is_sorted(times.begin(), times.end())) {
    throw ParameterError("time grid must be sorted ascending");
  }
  DynQfiSeries series;
  series.params = params;
  series.times = times;
  series.values.reserve(times.size());
  for (double t : times) series.values.push_back(dynamical_qfi(params, t, options));
  return series;
}

}  // namespace nhqfi
