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

#include "nhqfi/ground_qfi.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nhqfi/errors.hpp"
#include "nhqfi/kahan.hpp"

namespace nhqfi {

namespace {

constexpr double kNearSingularValue = std::numeric_limits<double>::max() * 1e-6;

[[noreturn]] void throw_defective(const ModelParams& params, const MomentumMode& mode) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "defective block at phi_" << mode.index << " = " << mode.phi << " (N=" << params.n_sites
      << ", h=" << params.h << "): eigenvectors coalesce; offset h slightly away from the "
      << "exceptional point";
  throw DefectiveModeError(msg.str(), mode.phi);
}

}  // namespace

std::string_view to_string(Branch branch) {
  return branch == Branch::Real ? "real" : "imaginary";
}

std::array<cplx, 2> BlockGroundState::normalized() const {
  const double n = std::sqrt(dirac_norm);
  return {u / n, v / n};
}

BlockGroundState block_ground_state(const ModelParams& params, const MomentumMode& mode) {
  const BlockOperator b = block_operator(params, mode);
  const Dispersion d = dispersion(b);
  if (d.defective) throw_defective(params, mode);

  BlockGroundState s;
  s.energy = -d.eps;
  s.u = b.alpha_plus;
  if (b.eps_sq > 0.0 && b.g > 0.0) {
    // eps - g = -(a+ a-)/(eps + g), free of cancellation for g > 0
    s.v = -(b.alpha_plus * b.alpha_minus) / (d.eps.real() + b.g);
  } else {
    s.v = d.eps - b.g;
  }
  s.dirac_norm = std::norm(s.u) + std::norm(s.v);

  // (alpha_plus, eps - g) degenerates to zero when alpha_plus vanishes; the
  // second row of (H + eps) x = 0 gives the parallel vector (g + eps, -alpha_minus).
  const cplx alt_u = b.g + d.eps;
  const cplx alt_v = -b.alpha_minus;
  const double alt_norm = std::norm(alt_u) + std::norm(alt_v);
  if (s.dirac_norm <= 1e-24 * alt_norm) {
    // unit length, so a diagonal block gives exactly the basis vector
    const double n = std::sqrt(alt_norm);
    s.u = alt_u / n;
    s.v = alt_v / n;
    s.dirac_norm = 1.0;
  }
  return s;
}

BlockQfi block_qfi_real(const ModelParams& params, const MomentumMode& mode) {
  const BlockOperator b = block_operator(params, mode);
  if (is_defective(b)) throw_defective(params, mode);
  if (b.eps_sq < 0.0) throw BranchError("block_qfi_real called on an imaginary-branch mode");

  const double gamma = params.gamma;
  const double k = params.k_ksea;
  const double s = std::sin(mode.phi);
  const double eps = std::sqrt(b.eps_sq);
  const double gk = (gamma - k) * (gamma + k);

  BlockQfi out;
  out.branch = Branch::Real;
  if (b.g >= 0.0) {
    const double num = s * s * gk * gk;
    const double den_factor = gamma * b.g + eps * k;
    out.value = num == 0.0 ? 0.0 : num / (b.eps_sq * den_factor * den_factor);
  } else {
    // (gamma g + eps K)(gamma g - eps K) = (gamma^2 - K^2)(g^2 + K^2 sin^2), which
    // removes the cancellation in gamma g + eps K when g < 0.
    const double m = gamma * b.g - eps * k;
    const double q = b.g * b.g + k * k * s * s;
    out.value = s * s * m * m / (b.eps_sq * q * q);
  }
  out.near_singular = !(out.value < kNearSingularValue);
  return out;
}

BlockQfi block_qfi_imag(const ModelParams& params, const MomentumMode& mode) {
  const BlockOperator b = block_operator(params, mode);
  if (is_defective(b)) throw_defective(params, mode);
  if (b.eps_sq > 0.0) throw BranchError("block_qfi_imag called on a real-branch mode");

  const double gamma = params.gamma;
  const double k = params.k_ksea;
  BlockQfi out;
  out.branch = Branch::Imaginary;
  out.value = (gamma - k) * (gamma + k) / (-b.eps_sq * gamma * gamma);
  out.near_singular = !(out.value < kNearSingularValue);
  return out;
}

BlockQfi block_qfi(const ModelParams& params, const MomentumMode& mode) {
  const BlockOperator b = block_operator(params, mode);
  if (is_defective(b)) throw_defective(params, mode);
  return b.eps_sq > 0.0 ? block_qfi_real(params, mode) : block_qfi_imag(params, mode);
}

QfiRecord ground_qfi(const ModelParams& params) {
  params.validate();
  QfiRecord rec;
  rec.params = params;
  rec.per_mode.reserve(static_cast<std::size_t>(params.n_sites / 2));
  KahanSum sum;
  for (int p = 1; p <= params.n_sites / 2; ++p) {
    const MomentumMode mode = momentum_mode(params.n_sites, p);
    const BlockQfi f = block_qfi(params, mode);
    rec.per_mode.push_back({mode.index, mode.phi, f.branch, f.value, f.near_singular});
    rec.near_singular = rec.near_singular || f.near_singular;
    sum.add(f.value);
  }
  rec.total = sum.value();
  return rec;
}

double asymptotic_qfi(const ModelParams& params, AsymptoticRegime regime) {
  params.validate();
  const double gamma = params.gamma;
  const double k = params.k_ksea;
  const double n_over_pi = static_cast<double>(params.n_sites) / std::numbers::pi;
  const double n2 = n_over_pi * n_over_pi;
  constexpr double kFieldTol = 1e-9;

  switch (regime) {
    case AsymptoticRegime::CriticalUnbroken:
      if (!(k > gamma)) throw ParameterError("critical_unbroken regime requires K > gamma");
      if (std::abs(std::abs(params.h) - kCriticalField) > kFieldTol) {
        throw ParameterError("critical_unbroken regime requires h = 1");
      }
      return n2 / (k * k);
    case AsymptoticRegime::Exceptional: {
      if (!(k < gamma)) throw ParameterError("exceptional regime requires K < gamma");
      const double h_e = std::sqrt(1.0 + (gamma - k) * (gamma + k));
      if (std::abs(std::abs(params.h) - h_e) > kFieldTol * h_e) {
        throw ParameterError("exceptional regime requires h = h_e");
      }
      return n2 / ((gamma - k) * (gamma + k));
    }
    case AsymptoticRegime::NearDegenerate: {
      if (std::abs(std::abs(params.h) - kCriticalField) > kFieldTol) {
        throw ParameterError("near_degenerate regime requires h = 1");
      }
      const double kappa = k - gamma;
      if (std::numbers::pi / params.n_sites <= 10.0 * std::abs(kappa)) {
        std::ostringstream msg;
        msg << "near_degenerate window violated: pi/N = " << std::numbers::pi / params.n_sites
            << " <= 10 |kappa| = " << 10.0 * std::abs(kappa);
        throw WindowError(msg.str());
      }
      return 16.0 * kappa * kappa * n2 * n2 * n2;
    }
  }
  throw ParameterError("unknown asymptotic regime");
}

}  // namespace nhqfi
