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

#include <limits>
#include <string>
#include <vector>

#include "nhqfi/model.hpp"

namespace nhqfi {

struct FitWindow {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

/// Ordinary least squares on (ln x, ln y).
struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;  // ln-domain
  double r_squared = 0.0;
  double window_min = 0.0;  // abscissa range actually used
  double window_max = 0.0;
  int n_points = 0;
  bool low_quality = false;  // r_squared < 0.99
};

inline constexpr double kLowQualityR2 = 0.99;

struct SweepResult {
  std::string variable;  // "N", "t", "dh" or "kappa"
  std::vector<double> axis;
  std::vector<double> values;
  ModelParams template_params;
  std::vector<ScalingFit> fits;    // one per axis point for exponent sweeps
  std::vector<bool> near_singular;  // carried from QfiRecord
  std::vector<std::string> flags;   // empty string when the point is clean
};

/// Throws InsufficientDataError with fewer than 3 points inside the window,
/// DomainError if any used point is nonpositive.
ScalingFit power_law_fit(const std::vector<double>& xs, const std::vector<double>& ys,
                         FitWindow window = {});

/// Ground-state QFI on an N grid (ascending) at the template's (h, gamma, K).
SweepResult qfi_vs_size(const ModelParams& tmpl, const std::vector<int>& sizes,
                        unsigned workers = 1);

/// Dynamical QFI at fixed t on an N grid.
SweepResult dynamical_qfi_vs_size(const ModelParams& tmpl, const std::vector<int>& sizes,
                                  double t, unsigned workers = 1);

enum class FieldAnchor { Critical, Exceptional };

/// mu(dh): ground-state QFI fitted over `sizes` at h = anchor + dh. Points
/// whose phase differs from the phase just beside the anchor on the same
/// side carry the flag "phase_changed:<phase>".
SweepResult exponent_vs_offset(const ModelParams& tmpl, const std::vector<double>& offsets,
                               const std::vector<int>& sizes, FieldAnchor anchor,
                               unsigned workers = 1);

struct KappaSweepOptions {
  double h = 1.0;
  /// Reject (kappa, N) pairs with pi/N < 10 |kappa|. When false the pairs are
  /// reported in `flags` instead.
  bool enforce_window = true;
  unsigned workers = 1;
};

/// mu(kappa) with K = gamma + kappa.
SweepResult kappa_sweep(double gamma, const std::vector<double>& kappas,
                        const std::vector<int>& sizes, const KappaSweepOptions& options = {});

/// beta from the dynamical QFI series over `times`, fitted inside `window`.
ScalingFit time_exponent(const ModelParams& tmpl, const std::vector<double>& times,
                         FitWindow window = {});

/// Octave-spaced integer grid lo, 2 lo, 4 lo, ... up to hi inclusive.
std::vector<int> octave_sizes(int lo, int hi);

/// n geometrically spaced values from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, int n);

/// n geometrically spaced even integers from lo to hi, duplicates removed.
std::vector<int> even_size_grid(int lo, int hi, int n);

}  // namespace nhqfi
