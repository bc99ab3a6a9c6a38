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

#include "nhqfi/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nhqfi/errors.hpp"

namespace nhqfi {

namespace {

constexpr double kPi = std::numbers::pi;

double kappa_product(double gamma, double k_ksea) {
  // gamma^2 - K^2 without squaring first
  return (gamma - k_ksea) * (gamma + k_ksea);
}

}  // namespace

void ModelParams::validate() const {
  if (!std::isfinite(h) || !std::isfinite(gamma) || !std::isfinite(k_ksea)) {
    throw ParameterError("model parameters must be finite");
  }
  if (gamma < 0.0 || k_ksea < 0.0) {
    throw ParameterError("gamma and K must be nonnegative");
  }
  if (n_sites < 4 || n_sites % 2 != 0) {
    throw ParameterError("n_sites must be even and >= 4, got " + std::to_string(n_sites));
  }
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Unbroken:
      return "unbroken";
    case Phase::Broken:
      return "broken";
    case Phase::ExceptionalPoint:
      return "exceptional_point";
    case Phase::ExceptionalLine:
      return "exceptional_line";
  }
  return "unknown";
}

MomentumMode momentum_mode(int n_sites, int index) {
  return {index, static_cast<double>(2 * index - 1) * kPi / static_cast<double>(n_sites)};
}

MomentumMode mode_nearest_pi(int n_sites) { return momentum_mode(n_sites, n_sites / 2); }

std::vector<MomentumMode> momentum_grid(const ModelParams& params) {
  params.validate();
  std::vector<MomentumMode> modes;
  modes.reserve(static_cast<std::size_t>(params.n_sites / 2));
  for (int p = 1; p <= params.n_sites / 2; ++p) {
    modes.push_back(momentum_mode(params.n_sites, p));
  }
  return modes;
}

BlockOperator block_operator(const ModelParams& params, double phi) {
  const double s = std::sin(phi);
  BlockOperator b;
  b.g = params.h + std::cos(phi);
  b.alpha_plus = (params.gamma + params.k_ksea) * s;
  b.alpha_minus = (params.gamma - params.k_ksea) * s;
  b.eps_sq = b.g * b.g - b.alpha_plus * b.alpha_minus;
  return b;
}

BlockOperator block_operator(const ModelParams& params, const MomentumMode& mode) {
  return block_operator(params, mode.phi);
}

bool is_defective(const BlockOperator& block) {
  const double scale =
      std::max({1.0, block.g * block.g, std::abs(block.alpha_plus * block.alpha_minus)});
  return std::abs(block.eps_sq) <= kExceptionalRelTolerance * scale;
}

Dispersion dispersion(const BlockOperator& block) {
  Dispersion d;
  d.eps_sq = block.eps_sq;
  if (is_defective(block)) {
    d.defective = true;
    d.eps = 0.0;
  } else if (block.eps_sq > 0.0) {
    d.eps = cplx(std::sqrt(block.eps_sq), 0.0);
  } else {
    d.eps = cplx(0.0, -std::sqrt(-block.eps_sq));
  }
  return d;
}

Dispersion dispersion(const ModelParams& params, const MomentumMode& mode) {
  return dispersion(block_operator(params, mode));
}

double dispersion_formula(double h, double gamma, double k_ksea, double phi) {
  const double g = h + std::cos(phi);
  const double s = std::sin(phi);
  return g * g + (k_ksea - gamma) * (k_ksea + gamma) * s * s;
}

PhaseInfo classify_phase(const ModelParams& params) {
  params.validate();
  PhaseInfo info;
  const double habs = std::abs(params.h);
  info.h_c = kCriticalField;
  info.at_critical = std::abs(habs - kCriticalField) <= kCriticalTolerance;
  info.h_tilde = 1.0 + kappa_product(params.gamma, params.k_ksea);

  if (params.k_ksea > params.gamma) {
    info.phase = Phase::Unbroken;
    return info;
  }
  const double h_e = std::sqrt(info.h_tilde);
  info.h_e = h_e;
  if (params.k_ksea == params.gamma) {
    info.phase = habs < kCriticalField ? Phase::ExceptionalLine : Phase::Unbroken;
    return info;
  }
  if (std::abs(habs - h_e) <= kCriticalTolerance * std::max(1.0, h_e)) {
    info.phase = Phase::ExceptionalPoint;
  } else if (habs > h_e) {
    info.phase = Phase::Unbroken;
  } else {
    info.phase = Phase::Broken;
  }
  if (auto zc = zero_crossings(params)) {
    info.omega_c = zc->omega_c;
    info.omega_pm = zc->omega_pm;
  }
  return info;
}

namespace {

// eps^2 as a function of the angle, plus its derivative, for Newton polishing.
struct EpsSqFn {
  double h, gamma, k;
  double value(double w) const { return dispersion_formula(h, gamma, k, w); }
  double slope(double w) const {
    const double h_tilde = 1.0 + (gamma - k) * (gamma + k);
    return -2.0 * std::sin(w) * (h + h_tilde * std::cos(w));
  }
};

double polish_root(const EpsSqFn& f, double w) {
  for (int it = 0; it < 3; ++it) {
    const double fv = f.value(w);
    const double df = f.slope(w);
    if (fv == 0.0 || df == 0.0) break;
    const double next = std::clamp(w - fv / df, 0.0, kPi);
    if (std::abs(f.value(next)) >= std::abs(fv)) break;
    w = next;
  }
  return w;
}

}  // namespace

std::optional<ZeroCrossings> zero_crossings(const ModelParams& params) {
  params.validate();
  if (!(params.k_ksea < params.gamma)) return std::nullopt;

  const double gk = kappa_product(params.gamma, params.k_ksea);  // > 0
  const double h_tilde = 1.0 + gk;
  const double h_e = std::sqrt(h_tilde);
  const double h = params.h;
  const double habs = std::abs(h);
  const EpsSqFn f{h, params.gamma, params.k_ksea};

  if (std::abs(habs - h_e) <= kCriticalTolerance * std::max(1.0, h_e)) {
    const double c = std::clamp(-h / h_tilde, -1.0, 1.0);
    return ZeroCrossings{std::acos(c), std::nullopt};
  }
  if (habs > h_e) return std::nullopt;

  // h_tilde c^2 + 2 h c + h^2 - (gamma^2 - K^2) = 0
  const double disc = std::sqrt(gk * (h_tilde - h * h));
  const double c_hi = std::clamp((-h + disc) / h_tilde, -1.0, 1.0);
  const double c_lo = std::clamp((-h - disc) / h_tilde, -1.0, 1.0);
  double w_lo = std::acos(c_hi);
  double w_hi = std::acos(c_lo);
  if (w_lo > 0.0 && w_lo < kPi) w_lo = polish_root(f, w_lo);
  if (w_hi > 0.0 && w_hi < kPi) w_hi = polish_root(f, w_hi);
  return ZeroCrossings{std::nullopt, std::make_pair(w_lo, w_hi)};
}

double hermitian_equivalent(const ModelParams& params) {
  params.validate();
  if (!(params.k_ksea > params.gamma)) {
    throw DomainError("hermitian_equivalent requires K > gamma");
  }
  return std::sqrt((params.k_ksea - params.gamma) * (params.k_ksea + params.gamma));
}

double xy_dispersion(double h, double gamma_xy, double phi) {
  const double g = h + std::cos(phi);
  const double s = std::sin(phi);
  return g * g + gamma_xy * gamma_xy * s * s;
}

}  // namespace nhqfi
