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

#include <cmath>
#include <numbers>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "nhqfi/dynamics.hpp"
#include "nhqfi/errors.hpp"
#include "nhqfi/ground_qfi.hpp"
#include "nhqfi/oracle.hpp"
#include "nhqfi/scaling.hpp"

using namespace nhqfi;
using std::numbers::pi;

namespace {

const cplx kI{0.0, 1.0};

double rel_diff(const Mat2c& a, const Mat2c& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

Mat2c fd_derivative(ModelParams p, const MomentumMode& m, double t, double d) {
  ModelParams up = p, dn = p;
  up.h += d;
  dn.h -= d;
  return (block_propagator(up, m, t).matrix - block_propagator(dn, m, t).matrix) / (2 * d);
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("propagator coefficients") {
  for (double z : {-0.49, -0.2, -1e-9, 0.0, 1e-9, 0.3, 0.49}) {
    const auto c = propagator_coefficients(z);
    const double s = std::sqrt(std::abs(z));
    if (z > 1e-6) {
      CHECK(c.c0 == doctest::Approx(std::cos(s)).epsilon(1e-15));
      CHECK(c.c1 == doctest::Approx(std::sin(s) / s).epsilon(1e-15));
    } else if (z < -1e-6) {
      CHECK(c.c0 == doctest::Approx(std::cosh(s)).epsilon(1e-15));
      CHECK(c.c1 == doctest::Approx(std::sinh(s) / s).epsilon(1e-15));
    }
  }
  const auto c0 = propagator_coefficients(0.0);
  CHECK(c0.c0 == 1.0);
  CHECK(c0.c1 == 1.0);
  CHECK(c0.dc0 == doctest::Approx(-0.5));
  CHECK(c0.dc1 == doctest::Approx(-1.0 / 6.0));

  // derivatives and continuity on both sides of the series radius
  for (double z : {-30.0, -2.0, -0.50001, -0.49999, -0.1, 0.1, 0.49999, 0.50001, 3.0, 40.0}) {
    const double d = 1e-6 * std::max(1.0, std::abs(z));
    const auto c = propagator_coefficients(z);
    const auto up = propagator_coefficients(z + d);
    const auto dn = propagator_coefficients(z - d);
    CHECK(c.dc0 == doctest::Approx((up.c0 - dn.c0) / (2 * d)).epsilon(1e-7));
    CHECK(c.dc1 == doctest::Approx((up.c1 - dn.c1) / (2 * d)).epsilon(1e-7));
    CHECK(c.dc0 == doctest::Approx(-0.5 * c.c1).epsilon(1e-12));
  }
  CHECK_THROWS_AS(propagator_coefficients(-1e6), OverflowError);
}

TEST_CASE("block propagator") {
  const ModelParams p{0.5, 0.5, 0.2, 4};
  const MomentumMode m{1, 2 * pi / 3};
  CHECK(rel_diff(block_propagator(p, m, 0.0).matrix, Mat2c::Identity()) == 0.0);

  // eps^2 = 0: U = I - i H t exactly
  const ModelParams crit{1.0, 0.3, 0.1, 4};
  const MomentumMode at_pi{1, pi};
  const Mat2c h = block_matrix(block_operator(crit, at_pi));
  const Mat2c exact = Mat2c::Identity() - kI * 1.7 * h;
  CHECK(rel_diff(block_propagator(crit, at_pi, 1.7).matrix, exact) <= 1e-15);

  const Mat2c hm = block_matrix(block_operator(p, m));
  const Mat2c ref = (-kI * 2.0 * hm).exp();
  CHECK(rel_diff(block_propagator(p, m, 2.0).matrix, ref) <= 1e-10);

  CHECK_THROWS_AS(block_propagator(p, m, -1.0), ParameterError);
  CHECK_THROWS_AS((block_propagator({0.0, 1.0, 0.0, 4}, {1, pi / 2}, 1e4)), OverflowError);
}

TEST_CASE("propagator determinant and semigroup") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int n = 0;
  while (n < 200) {
    const ModelParams p{2.0 * u(rng), u(rng), u(rng), 4};
    const MomentumMode m{1, pi * u(rng)};
    const double eps = std::sqrt(std::abs(block_operator(p, m).eps_sq));
    const double t1 = 10.0 * u(rng), t2 = 10.0 * u(rng);
    if (eps * (t1 + t2) > 20.0) continue;
    ++n;
    const Mat2c u1 = block_propagator(p, m, t1).matrix;
    const Mat2c u2 = block_propagator(p, m, t2).matrix;
    const Mat2c u12 = block_propagator(p, m, t1 + t2).matrix;
    CHECK(rel_diff(u1 * u2, u12) <= 1e-9);
    CHECK(std::abs(u1.determinant() - cplx(1.0)) <= 1e-10 * std::max(1.0, u1.squaredNorm()));
  }
}

TEST_CASE("propagator derivative") {
  const ModelParams p{1.5, 0.5, 0.2, 4};
  CHECK(propagator_derivative(p, {1, 0.3}, 0.0).norm() == 0.0);

  const MomentumMode m{1, 3 * pi / 8};
  CHECK(rel_diff(propagator_derivative(p, m, 1.7), fd_derivative(p, m, 1.7, 1e-6)) <= 1e-6);

  // alpha = 0: the family commutes and d_h U = -i t diag(-1, 1) U
  const ModelParams field_only{0.7, 0.0, 0.0, 4};
  const MomentumMode m2{1, 1.1};
  const double t = 2.3;
  Mat2c dh;
  dh << -1.0, 0.0, 0.0, 1.0;
  const Mat2c expected = -kI * t * dh * block_propagator(field_only, m2, t).matrix;
  CHECK(rel_diff(propagator_derivative(field_only, m2, t), expected) <= 1e-12);

  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const ModelParams q{2.0 * u(rng), u(rng), u(rng), 4};
    const MomentumMode mq{1, pi * u(rng)};
    const double tq = 5.0 * u(rng);
    const Mat2c analytic = propagator_derivative(q, mq, tq);
    CHECK(rel_diff(analytic, fd_derivative(q, mq, tq, 1e-6)) <= 1e-6);
    DynamicsOptions fd;
    fd.derivative = DerivativeMode::FiniteDifference;
    CHECK(rel_diff(propagator_derivative(q, mq, tq, fd), analytic) <= 1e-6);
  }
}

TEST_CASE("evolved block state") {
  const ModelParams broken{0.5, 0.5, 0.2, 4};
  const MomentumMode m{1, 2 * pi / 3};
  const auto s0 = evolve_block(broken, m, 0.0);
  CHECK(std::abs(s0.state(0) - cplx(1.0)) == 0.0);
  CHECK(std::abs(s0.state(1)) == 0.0);

  const auto s50 = evolve_block(broken, m, 50.0);
  CHECK(s50.state.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s50.norm_factor * s50.raw_norm == doctest::Approx(1.0).epsilon(1e-15));
  const auto g = block_ground_state(broken, m).normalized();
  const cplx overlap = std::conj(g[0]) * s50.state(0) + std::conj(g[1]) * s50.state(1);
  CHECK(std::abs(overlap) >= 1.0 - 1e-8);

  // unbroken: bounded oscillation of the raw norm
  const ModelParams unbroken{1.5, 0.5, 0.2, 4};
  for (double phi : {0.3, 1.2, 2.5, 3.0}) {
    const auto b = block_operator(unbroken, phi);
    REQUIRE(b.eps_sq > 0.0);
    const double eps = std::sqrt(b.eps_sq);
    // ||U|| <= 1 + ||H|| / eps for a diagonalizable block with real spectrum
    const double c = 1.0 + block_matrix(b).norm() / eps;
    for (int i = 0; i <= 1000; ++i) {
      const auto s = evolve_block(unbroken, {1, phi}, 0.1 * i);
      CHECK(s.raw_norm <= c);
      CHECK(s.raw_norm >= 1.0 / c);
      CHECK(s.state.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("dynamical QFI against dense evolution") {
  CHECK(dynamical_qfi({0.5, 0.5, 0.2, 8}, 0.0) == 0.0);
  CHECK(oracle::dense_evolution_qfi({0.5, 0.5, 0.2, 6}, 0.0) == 0.0);

  const ModelParams p{0.5, 0.5, 0.2, 8};
  CHECK(dynamical_qfi(p, 3.0) == doctest::Approx(oracle::dense_evolution_qfi(p, 3.0)).epsilon(1e-5));

  const ModelParams q{1.5, 0.5, 0.2, 6};
  CHECK(dynamical_qfi(q, 2.0) == doctest::Approx(oracle::dense_evolution_qfi(q, 2.0)).epsilon(1e-5));
}

TEST_CASE("Hermitian limit") {
  const ModelParams p{0.8, 0.0, 0.35, 6};
  for (const auto& m : momentum_grid(p)) {
    for (double t : {0.5, 3.0, 17.0, 60.0}) {
      CHECK(evolve_block(p, m, t).raw_norm == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  for (double t : {0.5, 2.0, 5.0}) {
    CHECK(dynamical_qfi(p, t) == doctest::Approx(oracle::dense_evolution_qfi(p, t)).epsilon(1e-7));
  }
}

TEST_CASE("broken modes saturate at long times") {
  const ModelParams p{0.5, 0.5, 0.2, 64};
  int broken = 0;
  for (const auto& m : momentum_grid(p)) {
    if (block_operator(p, m).eps_sq >= 0.0) continue;
    ++broken;
    const double f80 = block_dynamical_qfi(p, m, 80.0);
    const double f100 = block_dynamical_qfi(p, m, 100.0);
    CHECK(std::abs(f100 - f80) <= 0.01 * f100);
    // the plateau is the ground-state value of the mode
    CHECK(f100 == doctest::Approx(block_qfi_imag(p, m).value).epsilon(0.01));
  }
  CHECK(broken > 0);
}

TEST_CASE("time series") {
  const ModelParams p{0.5, 0.5, 0.2, 16};
  const auto s = qfi_time_series(p, {0.0, 0.5, 1.0, 2.0});
  REQUIRE(s.values.size() == 4);
  CHECK(s.values[0] == 0.0);
  for (double v : s.values) CHECK(v >= 0.0);
  CHECK(s.params == p);
  CHECK_THROWS_AS((qfi_time_series(p, {1.0, 0.5})), ParameterError);
  CHECK_THROWS_AS((dynamical_qfi({0.5, 1.0, 0.0, 16}, 2000.0)), OverflowError);
}

TEST_CASE("short-time exponent in the broken phase") {
  const ScalingFit fit = time_exponent({0.5, 0.5, 0.2, 64}, geometric_grid(0.05, 0.5, 10));
  CHECK(fit.exponent > 2.0);
  CHECK(fit.exponent <= 4.5);
}

}  // TEST_SUITE
