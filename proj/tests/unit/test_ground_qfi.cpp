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

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nhqfi/errors.hpp"
#include "nhqfi/ground_qfi.hpp"
#include "nhqfi/kahan.hpp"
#include "nhqfi/oracle.hpp"

using namespace nhqfi;
using std::numbers::pi;

namespace {

double residual(const ModelParams& p, const MomentumMode& m, const BlockGroundState& s) {
  const auto a = block_operator(p, m).matrix();
  const cplx r0 = a[0][0] * s.u + a[0][1] * s.v - s.energy * s.u;
  const cplx r1 = a[1][0] * s.u + a[1][1] * s.v - s.energy * s.v;
  return std::sqrt(std::norm(r0) + std::norm(r1)) / std::sqrt(s.dirac_norm);
}

// Normalized real-branch state at field h, used for derivative checks.
Eigen::Vector2d real_state(ModelParams p, const MomentumMode& m, double h) {
  p.h = h;
  const auto s = block_ground_state(p, m).normalized();
  return {s[0].real(), s[1].real()};
}

// QFI of the selected eigenvector of c * M(h) by central differences.
double scaled_block_fd(const ModelParams& p, double phi, double c, double step) {
  auto state = [&](double h) {
    ModelParams q = p;
    q.h = h;
    const auto a = block_operator(q, phi).matrix();
    Eigen::Matrix2cd m;
    m << a[0][0], a[0][1], a[1][0], a[1][1];
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(c * m);
    const auto& ev = es.eigenvalues();
    int k;
    if (std::abs(ev(0).imag()) < 1e-12 && std::abs(ev(1).imag()) < 1e-12) {
      k = ev(0).real() < ev(1).real() ? 0 : 1;
    } else {
      k = ev(0).imag() > ev(1).imag() ? 0 : 1;
    }
    return Eigen::VectorXcd(es.eigenvectors().col(k).normalized());
  };
  return oracle::fd_qfi(state(p.h - step), state(p.h), state(p.h + step), step);
}

}  // namespace

TEST_SUITE("ground_qfi") {

TEST_CASE("block ground state examples") {
  {
    const ModelParams p{2.0, 0.0, 0.0, 4};
    const auto d = block_ground_state(p, {1, pi / 2});
    const auto v = d.normalized();
    CHECK(std::abs(v[0] - cplx(1.0)) < 1e-15);
    CHECK(std::abs(v[1]) < 1e-15);
    CHECK(d.dirac_norm == doctest::Approx(1.0));
  }
  {
    const ModelParams p{2.0, 0.2, 0.5, 4};
    const MomentumMode m{1, pi / 2};
    const auto s = block_ground_state(p, m);
    CHECK(s.u.real() == doctest::Approx(0.7));
    CHECK(s.v.real() == doctest::Approx(std::sqrt(4.21) - 2.0).epsilon(1e-12));
    CHECK(s.dirac_norm == doctest::Approx(0.49269).epsilon(1e-5));
    CHECK(s.energy.real() == doctest::Approx(-std::sqrt(4.21)));
    CHECK(residual(p, m, s) <= 1e-10);
  }
  {
    const ModelParams p{0.5, 0.5, 0.2, 4};
    const MomentumMode m{1, 2 * pi / 3};
    const auto s = block_ground_state(p, m);
    const double sn = std::sin(m.phi);
    const double a_plus = 0.7 * sn;
    CHECK(s.dirac_norm == doctest::Approx(2 * 0.5 * a_plus * sn).epsilon(1e-12));
    CHECK(s.dirac_norm == doctest::Approx(std::norm(s.u) + std::norm(s.v)).epsilon(1e-14));
    CHECK(s.energy.imag() > 0.0);
    CHECK(residual(p, m, s) <= 1e-10);
  }
}

TEST_CASE("block ground state closed forms and residuals") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int real_seen = 0, imag_seen = 0;
  for (int i = 0; i < 2000; ++i) {
    const ModelParams p{2.5 * u(rng) - 0.5, u(rng), u(rng), 4};
    const MomentumMode m{1, pi * (0.001 + 0.998 * u(rng))};
    const auto b = block_operator(p, m);
    if (std::abs(b.eps_sq) < 1e-6) continue;
    const auto s = block_ground_state(p, m);
    CHECK(residual(p, m, s) <= 1e-10 * std::max(1.0, std::abs(s.energy)));
    const double sn = std::sin(m.phi);
    if (b.eps_sq > 0.0) {
      ++real_seen;
      if (std::abs(b.alpha_plus) > 1e-3) {
        const double eps = std::sqrt(b.eps_sq);
        const double a = 2 * p.k_ksea * (p.gamma + p.k_ksea) * sn * sn + 2 * b.g * (b.g - eps);
        CHECK(s.dirac_norm == doctest::Approx(a).epsilon(1e-9));
      }
    } else {
      ++imag_seen;
      CHECK(s.dirac_norm == doctest::Approx(2 * p.gamma * b.alpha_plus * sn).epsilon(1e-9));
    }
  }
  CHECK(real_seen > 100);
  CHECK(imag_seen > 100);
}

TEST_CASE("real-branch block QFI") {
  CHECK(block_qfi_real({2.0, 0.3, 0.3, 4}, {1, 1.0}).value == 0.0);
  CHECK(block_qfi_real({0.3, 0.4, 0.4, 4}, {1, 0.4}).value == 0.0);

  const auto f = block_qfi_real({2.0, 0.2, 0.5, 4}, {1, pi / 2});
  CHECK(f.branch == Branch::Real);
  CHECK(f.value == doctest::Approx(5.152e-3).epsilon(1e-3));
  CHECK(f.value == doctest::Approx(oracle::block_fd_qfi({2.0, 0.2, 0.5, 4}, {1, pi / 2}))
                       .epsilon(1e-6));

  for (int n : {1024, 4096, 16384}) {
    const ModelParams p{1.0, 0.2, 0.5, n};
    const double pred = asymptotic_qfi(p, AsymptoticRegime::CriticalUnbroken);
    CHECK(pred == doctest::Approx(4.0 * (n / pi) * (n / pi)));
    const double got = block_qfi_real(p, mode_nearest_pi(n)).value;
    CHECK(got / pred == doctest::Approx(1.0).epsilon(5.0 / n));
  }

  CHECK_THROWS_AS((block_qfi_real({0.5, 0.5, 0.2, 4}, {1, 2 * pi / 3})), BranchError);
  CHECK_THROWS_AS((block_qfi_real({1.0, 0.5, 0.2, 4}, {1, pi})), DefectiveModeError);
}

TEST_CASE("real-branch QFI at gamma = K with negative g") {
  // (gamma^2 - K^2)^2 vanishes but so does gamma g + eps K; the state still
  // depends on h and the QFI is 4 K^2 s^2 / (g^2 + K^2 s^2)^2.
  const ModelParams p{0.3, 0.4, 0.4, 4};
  const MomentumMode m{1, 2.5};
  const double g = p.h + std::cos(m.phi);
  REQUIRE(g < 0.0);
  const double s = std::sin(m.phi);
  const double k = p.k_ksea;
  const double expected = 4 * k * k * s * s / std::pow(g * g + k * k * s * s, 2);
  CHECK(block_qfi_real(p, m).value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(block_qfi_real(p, m).value == doctest::Approx(oracle::block_fd_qfi(p, m)).epsilon(1e-6));
}

TEST_CASE("imaginary-branch block QFI") {
  const auto f = block_qfi_imag({0.5, 0.5, 0.2, 4}, {1, 2 * pi / 3});
  CHECK(f.branch == Branch::Imaginary);
  CHECK(f.value == doctest::Approx(16.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS((block_qfi_imag({2.0, 0.2, 0.5, 4}, {1, pi / 2})), BranchError);

  // A broken mode needs g^2 < (gamma^2 - K^2) sin^2, so -eps^2 shrinks with
  // gamma^2 - K^2 and the ratio stays at least 1 / (gamma sin)^2.
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double gamma = 0.05 + u(rng);
    const double k = gamma * (1.0 - std::pow(10.0, -6.0 * u(rng)));
    const double phi = pi * (0.01 + 0.98 * u(rng));
    const double reach = std::sqrt((gamma - k) * (gamma + k)) * std::sin(phi);
    const ModelParams p{-std::cos(phi) + reach * (2.0 * u(rng) - 1.0) * 0.99, gamma, k, 4};
    if (block_operator(p, phi).eps_sq >= 0.0) continue;
    const double s = std::sin(phi);
    CHECK(block_qfi_imag(p, {1, phi}).value >= (1.0 - 1e-9) / (gamma * gamma * s * s));
  }
}

TEST_CASE("closed forms match block finite differences") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int real_n = 0, imag_n = 0;
  while (real_n < 200 || imag_n < 200) {
    const ModelParams p{2.5 * u(rng) - 0.5, u(rng), u(rng), 4};
    const MomentumMode m{1, pi * (0.01 + 0.98 * u(rng))};
    const auto b = block_operator(p, m);
    // keep the finite-difference stencil away from eps^2 = 0
    if (std::abs(b.eps_sq) < 1e-2) continue;
    const bool real = b.eps_sq > 0.0;
    if ((real && real_n >= 200) || (!real && imag_n >= 200)) continue;
    (real ? real_n : imag_n)++;
    const double analytic = block_qfi(p, m).value;
    const double fd = oracle::block_fd_qfi(p, m, 1e-6);
    CHECK(std::abs(analytic - fd) <= 1e-6 * std::max(std::abs(fd), 1e-3));
  }
}

TEST_CASE("derivative identities on the real branch") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int n = 0;
  while (n < 100) {
    const ModelParams p{2.5 * u(rng) - 0.5, u(rng), u(rng), 4};
    const MomentumMode m{1, pi * (0.01 + 0.98 * u(rng))};
    const auto b = block_operator(p, m);
    if (b.eps_sq < 1e-2) continue;
    ++n;
    const double d = 1e-5;
    auto eps_at = [&](double h) {
      ModelParams q = p;
      q.h = h;
      return std::sqrt(block_operator(q, m).eps_sq);
    };
    const double eps = eps_at(p.h);
    const double fd_eps = (eps_at(p.h + d) - eps_at(p.h - d)) / (2 * d);
    CHECK(fd_eps == doctest::Approx(b.g / eps).epsilon(1e-6));
    // v = eps - g, so d_h v = g/eps - 1 = -v/eps
    const double v = eps - b.g;
    const double fd_v = ((eps_at(p.h + d) - (b.g + d)) - (eps_at(p.h - d) - (b.g - d))) / (2 * d);
    CHECK(std::abs(fd_v + v / eps) <= 1e-6 * std::max(1.0, std::abs(v / eps)));
  }
}

TEST_CASE("real-branch state is orthogonal to its derivative") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int n = 0;
  while (n < 50) {
    const ModelParams p{2.5 * u(rng) - 0.5, u(rng), u(rng), 4};
    const MomentumMode m{1, pi * (0.01 + 0.98 * u(rng))};
    if (block_operator(p, m).eps_sq < 1e-1) continue;
    ++n;
    const double d = 2e-4;
    const Eigen::Vector2d psi = real_state(p, m, p.h);
    // fourth-order stencil
    const Eigen::Vector2d dpsi = (-real_state(p, m, p.h + 2 * d) + 8 * real_state(p, m, p.h + d) -
                                  8 * real_state(p, m, p.h - d) + real_state(p, m, p.h - 2 * d)) /
                                 (12 * d);
    CHECK(std::abs(psi.dot(dpsi)) <= 1e-10 * std::max(1.0, dpsi.norm()));
  }
}

TEST_CASE("ground QFI sums") {
  CHECK(ground_qfi({2.0, 0.3, 0.3, 8}).total == 0.0);

  const ModelParams p{2.0, 0.2, 0.5, 8};
  const auto rec = ground_qfi(p);
  CHECK(rec.total == doctest::Approx(oracle::fd_qfi_ground(p)).epsilon(1e-5));
  REQUIRE(rec.per_mode.size() == 4);
  KahanSum sum;
  for (std::size_t i = 0; i < rec.per_mode.size(); ++i) {
    CHECK(rec.per_mode[i].index == static_cast<int>(i) + 1);
    CHECK(rec.per_mode[i].value >= 0.0);
    sum.add(rec.per_mode[i].value);
  }
  CHECK(rec.total == sum.value());
  CHECK(rec.params == p);

  const auto broken = ground_qfi({0.5, 0.5, 0.2, 64});
  bool real = false, imag = false;
  for (const auto& m : broken.per_mode) {
    (m.branch == Branch::Real ? real : imag) = true;
    const auto b = block_operator(broken.params, {m.index, m.phi});
    CHECK((m.branch == Branch::Real) == (b.eps_sq > 0.0));
  }
  CHECK(real);
  CHECK(imag);
}

TEST_CASE("defective mode is reported with its momentum") {
  // N = 4, gamma = K = 0: eps_sq = (h + cos phi)^2 vanishes at h = -cos(3 pi / 4)
  const ModelParams p{-std::cos(3 * pi / 4), 0.0, 0.0, 4};
  try {
    ground_qfi(p);
    FAIL("expected DefectiveModeError");
  } catch (const DefectiveModeError& e) {
    CHECK(e.phi() == doctest::Approx(3 * pi / 4));
    CHECK(std::string(e.what()).find("phi_2") != std::string::npos);
  }
}

TEST_CASE("mode nearest pi dominates at the critical field") {
  for (auto [gamma, k] : {std::pair{0.2, 0.5}, std::pair{0.0, 0.3}, std::pair{0.4, 0.9}}) {
    for (int n : {64, 256, 1024}) {
      const auto rec = ground_qfi({1.0, gamma, k, n});
      double best = -1.0;
      int arg = 0;
      for (const auto& m : rec.per_mode) {
        if (m.value > best) {
          best = m.value;
          arg = m.index;
        }
      }
      CHECK(arg == n / 2);
    }
  }
}

TEST_CASE("QFI is unchanged by a uniform rescaling of the block") {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int n = 0;
  while (n < 30) {
    const ModelParams p{2.0 * u(rng), u(rng), u(rng), 4};
    const double phi = pi * (0.05 + 0.9 * u(rng));
    if (std::abs(block_operator(p, phi).eps_sq) < 1e-2) continue;
    ++n;
    const double c = 0.2 + 5.0 * u(rng);
    const double f1 = scaled_block_fd(p, phi, 1.0, 1e-6);
    const double fc = scaled_block_fd(p, phi, c, 1e-6);
    CHECK(fc == doctest::Approx(f1).epsilon(1e-6));
    CHECK(f1 == doctest::Approx(block_qfi(p, {1, phi}).value).epsilon(1e-6));
  }
}

TEST_CASE("asymptotic predictions") {
  CHECK(asymptotic_qfi({1.0, 0.2, 0.5, 4096}, AsymptoticRegime::CriticalUnbroken) ==
        doctest::Approx(4.0 * std::pow(4096 / pi, 2)));
  CHECK(asymptotic_qfi({1.1, 0.5, 0.2, 4096}, AsymptoticRegime::Exceptional) ==
        doctest::Approx(std::pow(4096 / pi, 2) / 0.21));
  CHECK(asymptotic_qfi({1.0, 0.5, 0.5 + 1e-6, 1000}, AsymptoticRegime::NearDegenerate) ==
        doctest::Approx(16e-12 * std::pow(1000 / pi, 6)));
  CHECK_THROWS_AS((asymptotic_qfi({1.0, 0.5, 0.51, 1000}, AsymptoticRegime::NearDegenerate)),
                  WindowError);
  CHECK_THROWS_AS((asymptotic_qfi({1.0, 0.5, 0.2, 64}, AsymptoticRegime::CriticalUnbroken)),
                  ParameterError);

  // the coefficient 16 holds once (pi/N)^2 >> 8 gamma kappa
  const double kappa = 1e-10;
  for (int n : {200, 1000}) {
    const ModelParams p{1.0, 0.5, 0.5 + kappa, n};
    const double block = block_qfi(p, mode_nearest_pi(n)).value;
    CHECK(block / asymptotic_qfi(p, AsymptoticRegime::NearDegenerate) ==
          doctest::Approx(1.0).epsilon(0.05));
  }
}

}  // TEST_SUITE

TEST_SUITE("ground_qfi_window") {

TEST_CASE("near-degenerate leading term at kappa = 1e-6, N = 1000") {
  const ModelParams p{1.0, 0.5, 0.5 + 1e-6, 1000};
  const double block = block_qfi(p, mode_nearest_pi(1000)).value;
  const double pred = asymptotic_qfi(p, AsymptoticRegime::NearDegenerate);
  INFO("block / 16 kappa^2 (N/pi)^6 = " << block / pred);
  CHECK(block / pred == doctest::Approx(1.0).epsilon(0.05));
}

}  // TEST_SUITE
