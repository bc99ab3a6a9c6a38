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

#include "nhqfi/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nhqfi/dynamics.hpp"
#include "nhqfi/errors.hpp"
#include "nhqfi/ground_qfi.hpp"
#include "nhqfi/parallel.hpp"

namespace nhqfi {

ScalingFit power_law_fit(const std::vector<double>& xs, const std::vector<double>& ys,
                         FitWindow window) {
  if (xs.size() != ys.size()) throw ParameterError("power_law_fit: xs and ys differ in length");
  std::vector<double> lx, ly;
  ScalingFit fit;
  fit.window_min = std::numeric_limits<double>::infinity();
  fit.window_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < window.lo || xs[i] > window.hi) continue;
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(ys[i])) {
      std::ostringstream msg;
      msg << "power_law_fit: nonpositive or non-finite point (" << xs[i] << ", " << ys[i] << ")";
      throw DomainError(msg.str());
    }
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
    fit.window_min = std::min(fit.window_min, xs[i]);
    fit.window_max = std::max(fit.window_max, xs[i]);
  }
  if (lx.size() < 3) {
    throw InsufficientDataError("power_law_fit needs at least 3 points inside the window, got " +
                                std::to_string(lx.size()));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double dx = lx[i] - mx;
    const double dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw DomainError("power_law_fit: all abscissae coincide");
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.exponent * lx[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.n_points = static_cast<int>(lx.size());
  fit.low_quality = fit.r_squared < kLowQualityR2;
  return fit;
}

namespace {

void require_strictly_increasing(const std::vector<double>& axis, const char* what) {
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) {
      throw ParameterError(std::string(what) + " grid must be strictly increasing");
    }
  }
  if (axis.empty()) throw ParameterError(std::string(what) + " grid is empty");
}

std::vector<double> as_doubles(const std::vector<int>& v) { return {v.begin(), v.end()}; }

ScalingFit fit_sizes(const ModelParams& tmpl, const std::vector<int>& sizes, bool* near_singular) {
  std::vector<double> values;
  values.reserve(sizes.size());
  for (int n : sizes) {
    ModelParams p = tmpl;
    p.n_sites = n;
    const QfiRecord rec = ground_qfi(p);
    if (near_singular != nullptr) *near_singular = *near_singular || rec.near_singular;
    values.push_back(rec.total);
  }
  return power_law_fit(as_doubles(sizes), values);
}

}  // namespace

SweepResult qfi_vs_size(const ModelParams& tmpl, const std::vector<int>& sizes, unsigned workers) {
  SweepResult out;
  out.variable = "N";
  out.template_params = tmpl;
  out.axis = as_doubles(sizes);
  require_strictly_increasing(out.axis, "N");
  const auto records = parallel_map(sizes.size(), workers, [&](std::size_t i) {
    ModelParams p = tmpl;
    p.n_sites = sizes[i];
    return ground_qfi(p);
  });
  for (const auto& rec : records) {
    out.values.push_back(rec.total);
    out.near_singular.push_back(rec.near_singular);
    out.flags.push_back(rec.near_singular ? "near_singular" : "");
  }
  return out;
}

SweepResult dynamical_qfi_vs_size(const ModelParams& tmpl, const std::vector<int>& sizes,
                                  double t, unsigned workers) {
  SweepResult out;
  out.variable = "N";
  out.template_params = tmpl;
  out.axis = as_doubles(sizes);
  require_strictly_increasing(out.axis, "N");
  out.values = parallel_map(sizes.size(), workers, [&](std::size_t i) {
    ModelParams p = tmpl;
    p.n_sites = sizes[i];
    return dynamical_qfi(p, t);
  });
  out.near_singular.assign(sizes.size(), false);
  out.flags.assign(sizes.size(), "");
  return out;
}

SweepResult exponent_vs_offset(const ModelParams& tmpl, const std::vector<double>& offsets,
                               const std::vector<int>& sizes, FieldAnchor anchor,
                               unsigned workers) {
  double h0 = kCriticalField;
  if (anchor == FieldAnchor::Exceptional) {
    if (!(tmpl.k_ksea < tmpl.gamma)) {
      throw ParameterError("the exceptional anchor h_e exists only for K < gamma");
    }
    h0 = std::sqrt(1.0 + (tmpl.gamma - tmpl.k_ksea) * (tmpl.gamma + tmpl.k_ksea));
  }
  SweepResult out;
  out.variable = "dh";
  out.template_params = tmpl;
  out.axis = offsets;
  require_strictly_increasing(out.axis, "dh");

  struct Point {
    ScalingFit fit;
    bool near_singular = false;
    std::string flag;
  };
  const auto points = parallel_map(offsets.size(), workers, [&](std::size_t i) {
    Point pt;
    ModelParams p = tmpl;
    p.h = h0 + offsets[i];
    pt.fit = fit_sizes(p, sizes, &pt.near_singular);
    ModelParams beside = tmpl;
    beside.h = h0 + 1e-6 * offsets[i];
    const Phase here = classify_phase(p).phase;
    const Phase ref = classify_phase(beside).phase;
    if (here != ref) pt.flag = "phase_changed:" + std::string(to_string(here));
    return pt;
  });
  for (const auto& pt : points) {
    out.values.push_back(pt.fit.exponent);
    out.fits.push_back(pt.fit);
    out.near_singular.push_back(pt.near_singular);
    out.flags.push_back(pt.flag);
  }
  return out;
}

SweepResult kappa_sweep(double gamma, const std::vector<double>& kappas,
                        const std::vector<int>& sizes, const KappaSweepOptions& options) {
  SweepResult out;
  out.variable = "kappa";
  out.template_params = ModelParams{options.h, gamma, gamma, sizes.empty() ? 4 : sizes.front()};
  out.axis = kappas;
  require_strictly_increasing(out.axis, "kappa");
  if (sizes.empty()) throw ParameterError("N grid is empty");

  std::vector<std::string> window_flags(kappas.size());
  std::ostringstream offending;
  bool violated = false;
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    if (kappas[i] == 0.0) {
      throw ParameterError("kappa = 0 gives identically vanishing QFI at h = 1; rejected");
    }
    if (gamma + kappas[i] < 0.0) throw ParameterError("kappa makes K negative");
    for (int n : sizes) {
      if (std::numbers::pi / n < 10.0 * std::abs(kappas[i])) {
        if (!window_flags[i].empty()) window_flags[i] += ';';
        window_flags[i] += "out_of_window:N=" + std::to_string(n);
        offending << " (kappa=" << kappas[i] << ", N=" << n << ")";
        violated = true;
      }
    }
  }
  if (violated && options.enforce_window) {
    throw WindowError("pi/N >= 10|kappa| violated for" + offending.str());
  }

  struct Point {
    ScalingFit fit;
    bool near_singular = false;
  };
  const auto points = parallel_map(kappas.size(), options.workers, [&](std::size_t i) {
    Point pt;
    ModelParams p{options.h, gamma, gamma + kappas[i], sizes.front()};
    pt.fit = fit_sizes(p, sizes, &pt.near_singular);
    return pt;
  });
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.values.push_back(points[i].fit.exponent);
    out.fits.push_back(points[i].fit);
    out.near_singular.push_back(points[i].near_singular);
    out.flags.push_back(window_flags[i]);
  }
  return out;
}

ScalingFit time_exponent(const ModelParams& tmpl, const std::vector<double>& times,
                         FitWindow window) {
  const DynQfiSeries series = qfi_time_series(tmpl, times);
  return power_law_fit(series.times, series.values, window);
}

std::vector<int> octave_sizes(int lo, int hi) {
  std::vector<int> out;
  for (long long n = lo; n <= hi; n *= 2) out.push_back(static_cast<int>(n));
  return out;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
  if (n < 2 || !(lo > 0.0) || !(hi > lo)) {
    throw ParameterError("geometric grid needs n >= 2 and 0 < lo < hi");
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  const double r = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(r * i);
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<int> even_size_grid(int lo, int hi, int n) {
  std::vector<int> out;
  for (double x : geometric_grid(lo, hi, n)) {
    const int v = 2 * static_cast<int>(std::lround(x / 2.0));
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  return out;
}

}  // namespace nhqfi
