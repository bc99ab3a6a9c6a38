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

#include "nhqfi/io/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nhqfi/dynamics.hpp"
#include "nhqfi/errors.hpp"
#include "nhqfi/ground_qfi.hpp"
#include "nhqfi/io/output.hpp"
#include "nhqfi/oracle.hpp"
#include "nhqfi/parallel.hpp"
#include "nhqfi/scaling.hpp"

namespace nhqfi::io {

using ojson = nlohmann::ordered_json;

namespace {

// Failures of a single grid point, classified for the exit code.
struct Failure {
  std::string message;
  bool config = false;
  bool overflow = false;
};

template <typename T>
struct Outcome {
  std::optional<T> value;
  Failure failure;
};

template <typename F>
auto attempt(F&& f) -> Outcome<decltype(f())> {
  Outcome<decltype(f())> out;
  try {
    out.value = f();
  } catch (const OverflowError& e) {
    out.failure = {e.what(), false, true};
  } catch (const ParameterError& e) {
    out.failure = {e.what(), true, false};
  } catch (const std::exception& e) {
    out.failure = {e.what(), false, false};
  }
  return out;
}

struct Context {
  const Config& config;
  const CommandOptions& options;
  Manifest& manifest;
  std::ostream& out;
  std::ostream& err;
  std::uint64_t seed = 0;
};

ojson json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

ojson phase_json(const PhaseInfo& info) {
  ojson j;
  j["phase"] = std::string(to_string(info.phase));
  j["at_critical"] = info.at_critical;
  j["h_c"] = info.h_c;
  j["h_e"] = info.h_e ? ojson(*info.h_e) : ojson(nullptr);
  j["h_tilde"] = info.h_tilde;
  j["omega_c"] = info.omega_c ? ojson(*info.omega_c) : ojson(nullptr);
  j["omega_pm"] = info.omega_pm ? ojson::array({info.omega_pm->first, info.omega_pm->second})
                                : ojson(nullptr);
  return j;
}

ojson fit_json(const ScalingFit& fit) {
  return {{"exponent", fit.exponent},         {"intercept", fit.intercept},
          {"r_squared", fit.r_squared},       {"window_min", fit.window_min},
          {"window_max", fit.window_max},     {"n_points", fit.n_points},
          {"low_quality", fit.low_quality}};
}

std::string dump(const ojson& j) { return j.dump(2) + '\n'; }

void write_table(Context& ctx, const std::string& stem, const Table& table) {
  if (ctx.options.format == OutputFormat::Csv) {
    ctx.manifest.write_file(stem + ".csv", table.to_csv());
  } else {
    ctx.manifest.write_file(stem + ".json", table.to_json());
  }
}

// Sorted copy of a grid; duplicates are a configuration error.
template <typename T>
std::vector<T> sorted_grid(std::vector<T> v, const std::string& what) {
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end()) {
    throw ConfigError(what + " grid contains duplicate values");
  }
  return v;
}

FitWindow read_window(const Config& cfg, const std::string& section) {
  FitWindow w;
  w.lo = cfg.get_double_or(section, "fit_lo", w.lo);
  w.hi = cfg.get_double_or(section, "fit_hi", w.hi);
  if (!(w.lo <= w.hi)) throw ConfigError("[" + section + "] fit_lo must not exceed fit_hi");
  return w;
}

DynamicsOptions read_dynamics(const Config& cfg, const std::string& section) {
  DynamicsOptions opt;
  const std::string mode = cfg.get_or(section, "derivative", "analytic");
  if (mode == "analytic") {
    opt.derivative = DerivativeMode::Analytic;
  } else if (mode == "fd") {
    opt.derivative = DerivativeMode::FiniteDifference;
    opt.fd_step = cfg.get_double_or(section, "fd_step", opt.fd_step);
  } else {
    throw ConfigError("[" + section + "] derivative must be analytic or fd");
  }
  return opt;
}

ModelParams read_params(const Config& cfg, const std::string& section, int n_sites) {
  ModelParams p{cfg.get_double(section, "h"), cfg.get_double(section, "gamma"),
                cfg.get_double(section, "k"), n_sites};
  p.validate();
  return p;
}

int report_failures(Context& ctx, const std::vector<std::pair<std::string, Failure>>& failures) {
  int code = kExitOk;
  for (const auto& [id, f] : failures) {
    ctx.err << "error: " << id << ": " << f.message << '\n';
    code = std::max(code, f.config ? kExitConfig : kExitCompute);
  }
  return code;
}

std::string point_id(const ModelParams& p) {
  return "N=" + std::to_string(p.n_sites) + ",h=" + format_double(p.h) +
         ",gamma=" + format_double(p.gamma) + ",K=" + format_double(p.k_ksea);
}

// ---------------------------------------------------------------- ground-qfi

int cmd_ground_qfi(Context& ctx) {
  const std::string sec = "ground-qfi";
  const auto sizes = sorted_grid(ctx.config.get_ints(sec, "n"), "n");
  const auto fields = sorted_grid(ctx.config.get_doubles(sec, "h"), "h");
  const double gamma = ctx.config.get_double(sec, "gamma");
  const double k = ctx.config.get_double(sec, "k");
  const bool per_mode = ctx.config.get_bool_or(sec, "per_mode", false);

  std::vector<ModelParams> points;
  for (int n : sizes) {
    for (double h : fields) {
      ModelParams p{h, gamma, k, n};
      p.validate();
      points.push_back(p);
    }
  }

  const auto results = parallel_map(points.size(), ctx.options.workers, [&](std::size_t i) {
    return attempt([&] { return ground_qfi(points[i]); });
  });

  Table table({"N", "h", "gamma", "K", "phase", "qfi_total", "flag_near_singular"});
  Table modes({"N", "h", "p", "phi", "branch", "qfi", "flag_near_singular"});
  std::vector<std::pair<std::string, Failure>> failures;
  ojson summary_points = ojson::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const std::string phase(to_string(classify_phase(p).phase));
    ojson jp = {{"N", p.n_sites}, {"h", p.h}, {"phase", phase}};
    if (results[i].value) {
      const QfiRecord& rec = *results[i].value;
      table.add_row({std::int64_t{p.n_sites}, p.h, p.gamma, p.k_ksea, phase, rec.total,
                     rec.near_singular});
      if (per_mode) {
        for (const auto& m : rec.per_mode) {
          modes.add_row({std::int64_t{p.n_sites}, p.h, std::int64_t{m.index}, m.phi,
                         std::string(to_string(m.branch)), m.value, m.near_singular});
        }
      }
      jp["qfi_total"] = json_number(rec.total);
      jp["flag_near_singular"] = rec.near_singular;
      jp["status"] = "ok";
      ctx.manifest.add_task(point_id(p), "ok");
    } else {
      jp["status"] = "failed";
      jp["message"] = results[i].failure.message;
      failures.emplace_back(point_id(p), results[i].failure);
      ctx.manifest.add_task(point_id(p), "failed", results[i].failure.message);
    }
    summary_points.push_back(std::move(jp));
  }

  ojson landmarks = ojson::array();
  for (double h : fields) {
    ojson l = phase_json(classify_phase(ModelParams{h, gamma, k, sizes.front()}));
    l["h"] = h;
    landmarks.push_back(std::move(l));
  }
  ojson summary;
  summary["command"] = "ground-qfi";
  summary["gamma"] = gamma;
  summary["K"] = k;
  summary["landmarks"] = std::move(landmarks);
  summary["points"] = std::move(summary_points);

  write_table(ctx, "ground_qfi", table);
  if (per_mode) write_table(ctx, "ground_qfi_modes", modes);
  ctx.manifest.write_file("ground_qfi_summary.json", dump(summary));
  ctx.out << "ground-qfi: " << table.rows().size() << " of " << points.size() << " points\n";
  return report_failures(ctx, failures);
}

// ------------------------------------------------------------------- dyn-qfi

int cmd_dyn_qfi(Context& ctx) {
  const std::string sec = "dyn-qfi";
  const auto sizes = sorted_grid(ctx.config.get_ints(sec, "n"), "n");
  const auto times = sorted_grid(ctx.config.get_doubles(sec, "t"), "t");
  if (times.front() < 0.0) throw ConfigError("[dyn-qfi] t must be nonnegative");
  const ModelParams tmpl = read_params(ctx.config, sec, sizes.front());
  const DynamicsOptions dyn = read_dynamics(ctx.config, sec);
  for (int n : sizes) ModelParams{tmpl.h, tmpl.gamma, tmpl.k_ksea, n}.validate();
  const std::string phase(to_string(classify_phase(tmpl).phase));

  const std::size_t nt = times.size();
  const auto results =
      parallel_map(sizes.size() * nt, ctx.options.workers, [&](std::size_t i) {
        ModelParams p = tmpl;
        p.n_sites = sizes[i / nt];
        return attempt([&] { return dynamical_qfi(p, times[i % nt], dyn); });
      });

  Table table({"t", "N", "qfi", "phase"});
  std::vector<std::pair<std::string, Failure>> failures;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const int n = sizes[i / nt];
    const double t = times[i % nt];
    const std::string id = "N=" + std::to_string(n) + ",t=" + format_double(t);
    if (results[i].value) {
      table.add_row({t, std::int64_t{n}, *results[i].value, phase});
      ctx.manifest.add_task(id, "ok");
    } else if (results[i].failure.overflow) {
      ctx.manifest.add_task(id, "skipped", results[i].failure.message);
      ctx.err << "warning: " << id << " skipped: " << results[i].failure.message << '\n';
    } else {
      ctx.manifest.add_task(id, "failed", results[i].failure.message);
      failures.emplace_back(id, results[i].failure);
    }
  }
  write_table(ctx, "dyn_qfi", table);
  ctx.out << "dyn-qfi: " << table.rows().size() << " of " << results.size() << " points\n";
  return report_failures(ctx, failures);
}

// --------------------------------------------------------------------- sweep

struct SweepPoint {
  std::vector<Cell> row;
  ojson fit;
};

int finish_sweep(Context& ctx, const std::string& kind, const ojson& params, Table& table,
                 std::vector<std::string> ids, std::vector<Outcome<SweepPoint>>& results,
                 ojson extra = ojson::object()) {
  std::vector<std::pair<std::string, Failure>> failures;
  ojson fits = ojson::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].value) {
      table.add_row(results[i].value->row);
      if (!results[i].value->fit.is_null()) fits.push_back(results[i].value->fit);
      ctx.manifest.add_task(ids[i], "ok");
    } else if (results[i].failure.overflow) {
      ctx.manifest.add_task(ids[i], "skipped", results[i].failure.message);
      ctx.err << "warning: " << ids[i] << " skipped: " << results[i].failure.message << '\n';
    } else {
      ctx.manifest.add_task(ids[i], "failed", results[i].failure.message);
      failures.emplace_back(ids[i], results[i].failure);
      fits.push_back({{"point", ids[i]}, {"status", "failed"},
                      {"message", results[i].failure.message}});
    }
  }
  ojson j;
  j["command"] = "sweep";
  j["kind"] = kind;
  j["params"] = params;
  for (auto& [key, value] : extra.items()) j[key] = value;
  j["fits"] = std::move(fits);
  write_table(ctx, "sweep", table);
  ctx.manifest.write_file("fits.json", dump(j));
  ctx.out << "sweep " << kind << ": " << table.rows().size() << " of " << results.size()
          << " points\n";
  return report_failures(ctx, failures);
}

// Fit over the successful rows of a per-point table; sets "fit" in `extra`.
void add_series_fit(Context& ctx, ojson& extra, const std::vector<double>& xs,
                    const std::vector<double>& ys, FitWindow window,
                    std::vector<std::pair<std::string, Failure>>& failures) {
  auto fit = attempt([&] { return power_law_fit(xs, ys, window); });
  if (fit.value) {
    extra["fit"] = fit_json(*fit.value);
  } else {
    extra["fit"] = {{"status", "failed"}, {"message", fit.failure.message}};
    failures.emplace_back("fit", fit.failure);
    ctx.manifest.add_task("fit", "failed", fit.failure.message);
  }
}

int sweep_series(Context& ctx, const std::string& kind) {
  const std::string sec = "sweep";
  const bool over_time = kind == "time";
  std::vector<double> axis;
  std::vector<int> sizes;
  double t_fixed = 0.0;
  if (over_time) {
    axis = sorted_grid(ctx.config.get_doubles(sec, "t"), "t");
    sizes = {static_cast<int>(ctx.config.get_int(sec, "n"))};
    if (axis.front() < 0.0) throw ConfigError("[sweep] t must be nonnegative");
  } else {
    sizes = sorted_grid(ctx.config.get_ints(sec, "n"), "n");
    axis.assign(sizes.begin(), sizes.end());
    if (kind == "dyn-size") t_fixed = ctx.config.get_double(sec, "t");
  }
  const ModelParams tmpl = read_params(ctx.config, sec, sizes.front());
  for (int n : sizes) ModelParams{tmpl.h, tmpl.gamma, tmpl.k_ksea, n}.validate();
  const FitWindow window = read_window(ctx.config, sec);
  const DynamicsOptions dyn = read_dynamics(ctx.config, sec);

  auto results = parallel_map(axis.size(), ctx.options.workers, [&](std::size_t i) {
    return attempt([&] {
      ModelParams p = tmpl;
      SweepPoint pt;
      pt.fit = nullptr;
      if (over_time) {
        pt.row = {axis[i], dynamical_qfi(p, axis[i], dyn)};
      } else if (kind == "dyn-size") {
        p.n_sites = sizes[i];
        pt.row = {std::int64_t{sizes[i]}, dynamical_qfi(p, t_fixed, dyn)};
      } else {
        p.n_sites = sizes[i];
        const QfiRecord rec = ground_qfi(p);
        pt.row = {std::int64_t{sizes[i]}, rec.total, rec.near_singular};
      }
      return pt;
    });
  });

  Table table = over_time            ? Table({"t", "qfi"})
                : kind == "dyn-size" ? Table({"N", "qfi"})
                                     : Table({"N", "qfi_total", "flag_near_singular"});
  std::vector<std::string> ids;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < axis.size(); ++i) {
    ids.push_back((over_time ? "t=" : "N=") + format_double(axis[i]));
    if (results[i].value) {
      xs.push_back(axis[i]);
      ys.push_back(std::get<double>(results[i].value->row[1]));
    }
  }
  ojson params = {{"h", tmpl.h}, {"gamma", tmpl.gamma}, {"K", tmpl.k_ksea}};
  if (over_time) params["N"] = sizes.front();
  if (kind == "dyn-size") params["t"] = t_fixed;
  params["phase"] = std::string(to_string(classify_phase(tmpl).phase));

  std::vector<std::pair<std::string, Failure>> fit_failures;
  ojson extra = ojson::object();
  add_series_fit(ctx, extra, xs, ys, window, fit_failures);
  int code = finish_sweep(ctx, kind, params, table, ids, results, extra);
  const int fit_code = report_failures(ctx, fit_failures);
  return std::max(code, fit_code);
}

int sweep_offset(Context& ctx) {
  const std::string sec = "sweep";
  const auto offsets = sorted_grid(ctx.config.get_doubles(sec, "dh"), "dh");
  const auto sizes = sorted_grid(ctx.config.get_ints(sec, "n"), "n");
  const std::string anchor_name = ctx.config.get_or(sec, "anchor", "critical");
  FieldAnchor anchor;
  if (anchor_name == "critical") {
    anchor = FieldAnchor::Critical;
  } else if (anchor_name == "exceptional") {
    anchor = FieldAnchor::Exceptional;
  } else {
    throw ConfigError("[sweep] anchor must be critical or exceptional");
  }
  ModelParams tmpl{0.0, ctx.config.get_double(sec, "gamma"), ctx.config.get_double(sec, "k"),
                   sizes.front()};
  for (int n : sizes) ModelParams{1.0, tmpl.gamma, tmpl.k_ksea, n}.validate();
  if (anchor == FieldAnchor::Exceptional && !(tmpl.k_ksea < tmpl.gamma)) {
    throw ConfigError("[sweep] the exceptional anchor needs K < gamma");
  }

  auto results = parallel_map(offsets.size(), ctx.options.workers, [&](std::size_t i) {
    return attempt([&] {
      const SweepResult r = exponent_vs_offset(tmpl, {offsets[i]}, sizes, anchor, 1);
      const ScalingFit& f = r.fits.front();
      const double h0 =
          anchor == FieldAnchor::Critical
              ? kCriticalField
              : std::sqrt(1.0 + (tmpl.gamma - tmpl.k_ksea) * (tmpl.gamma + tmpl.k_ksea));
      SweepPoint pt;
      pt.row = {offsets[i], h0 + offsets[i], f.exponent, f.intercept, f.r_squared,
                std::int64_t{f.n_points}, f.low_quality, bool(r.near_singular.front()),
                r.flags.front()};
      pt.fit = fit_json(f);
      pt.fit["dh"] = offsets[i];
      pt.fit["flag"] = r.flags.front();
      return pt;
    });
  });
  Table table({"dh", "h", "mu", "intercept", "r_squared", "n_points", "low_quality",
               "flag_near_singular", "flag"});
  std::vector<std::string> ids;
  for (double d : offsets) ids.push_back("dh=" + format_double(d));
  ojson params = {{"gamma", tmpl.gamma}, {"K", tmpl.k_ksea}, {"anchor", anchor_name},
                  {"sizes", sizes}};
  return finish_sweep(ctx, "offset", params, table, ids, results);
}

int sweep_kappa(Context& ctx) {
  const std::string sec = "sweep";
  const auto kappas = sorted_grid(ctx.config.get_doubles(sec, "kappa"), "kappa");
  const auto sizes = sorted_grid(ctx.config.get_ints(sec, "n"), "n");
  KappaSweepOptions opt;
  opt.h = ctx.config.get_double_or(sec, "h", 1.0);
  opt.enforce_window = ctx.config.get_bool_or(sec, "enforce_window", true);
  opt.workers = 1;
  const double gamma = ctx.config.get_double(sec, "gamma");
  for (double kappa : kappas) {
    if (kappa == 0.0) throw ConfigError("[sweep] kappa = 0 is not allowed");
    for (int n : sizes) ModelParams{opt.h, gamma, gamma + kappa, n}.validate();
  }

  auto results = parallel_map(kappas.size(), ctx.options.workers, [&](std::size_t i) {
    return attempt([&] {
      const SweepResult r = kappa_sweep(gamma, {kappas[i]}, sizes, opt);
      const ScalingFit& f = r.fits.front();
      SweepPoint pt;
      pt.row = {kappas[i], gamma + kappas[i], f.exponent, f.intercept, f.r_squared,
                std::int64_t{f.n_points}, f.low_quality, bool(r.near_singular.front()),
                r.flags.front()};
      pt.fit = fit_json(f);
      pt.fit["kappa"] = kappas[i];
      pt.fit["flag"] = r.flags.front();
      return pt;
    });
  });
  Table table({"kappa", "K", "mu", "intercept", "r_squared", "n_points", "low_quality",
               "flag_near_singular", "flag"});
  std::vector<std::string> ids;
  for (double k : kappas) ids.push_back("kappa=" + format_double(k));
  ojson params = {{"h", opt.h}, {"gamma", gamma}, {"sizes", sizes},
                  {"enforce_window", opt.enforce_window}};
  return finish_sweep(ctx, "kappa", params, table, ids, results);
}

int cmd_sweep(Context& ctx) {
  const std::string kind = ctx.config.get("sweep", "kind");
  if (kind == "size" || kind == "dyn-size" || kind == "time") return sweep_series(ctx, kind);
  if (kind == "offset") return sweep_offset(ctx);
  if (kind == "kappa") return sweep_kappa(ctx);
  throw ConfigError("[sweep] kind must be one of size, dyn-size, time, offset, kappa");
}

// ----------------------------------------------------------------------- fit

int cmd_fit(Context& ctx) {
  const std::string sec = "fit";
  const CsvData data = read_csv(ctx.config.get(sec, "input"));
  const std::string xname = ctx.config.get(sec, "x");
  const std::string yname = ctx.config.get(sec, "y");
  std::size_t xi, yi;
  try {
    xi = data.column(xname);
    yi = data.column(yname);
  } catch (const std::out_of_range& e) {
    throw ConfigError(std::string("[fit] ") + e.what());
  }
  std::vector<double> xs, ys;
  for (const auto& row : data.rows) {
    const auto x = expand_values(row[xi]);
    const auto y = expand_values(row[yi]);
    if (x.size() != 1 || y.size() != 1) throw ConfigError("[fit] non-numeric cell in input");
    xs.push_back(x.front());
    ys.push_back(y.front());
  }
  const FitWindow window = read_window(ctx.config, sec);
  const ScalingFit fit = power_law_fit(xs, ys, window);
  ojson j = {{"command", "fit"}, {"x", xname}, {"y", yname}, {"fit", fit_json(fit)}};
  ctx.manifest.write_file("fit.json", dump(j));
  ctx.manifest.add_task("fit", "ok");
  ctx.out << "exponent " << format_double(fit.exponent) << " (R^2 "
          << format_double(fit.r_squared) << ", " << fit.n_points << " points)\n";
  return kExitOk;
}

// -------------------------------------------------------------- oracle-check

struct OracleRow {
  std::string name;
  ojson params;
  double analytic = 0.0;
  double oracle = 0.0;
  double rel_err = 0.0;
  bool pass = false;
};

double rel_error(double a, double b) {
  const double denom = std::max(std::abs(b), 1e-300);
  return std::abs(a - b) / denom;
}

ojson params_json(const ModelParams& p) {
  return {{"N", p.n_sites}, {"h", p.h}, {"gamma", p.gamma}, {"K", p.k_ksea}};
}

int cmd_oracle_check(Context& ctx) {
  const std::string sec = "oracle-check";
  const auto sizes = sorted_grid(ctx.config.get_ints(sec, "sizes"), "sizes");
  const int count = static_cast<int>(ctx.config.get_int_or(sec, "points", 20));
  const double tol = ctx.config.get_double_or(sec, "tolerance", 1e-5);
  const double margin = ctx.config.get_double_or(sec, "eps_margin", 1e-8);
  const bool dynamics = ctx.config.get_bool_or(sec, "dynamics", true);
  const double corrupt = ctx.config.get_double_or(sec, "corrupt_scale", 1.0);
  const int dyn_n = static_cast<int>(ctx.config.get_int_or(sec, "dynamics_n", 6));
  if (count < 1) throw ConfigError("[oracle-check] points must be positive");
  for (int n : sizes) {
    ModelParams{1.0, 0.0, 0.0, n}.validate();
    if (n > oracle::kMaxDenseSites) {
      throw ConfigError("[oracle-check] dense sizes are limited to N <= " +
                        std::to_string(oracle::kMaxDenseSites));
    }
  }
  if (dynamics) {
    ModelParams{1.0, 0.0, 0.0, dyn_n}.validate();
    if (dyn_n > oracle::kMaxEvolutionSites) {
      throw ConfigError("[oracle-check] dynamics_n is limited to N <= " +
                        std::to_string(oracle::kMaxEvolutionSites));
    }
  }

  // Each job produces rows; N >= 12 jobs run one at a time.
  using Job = std::function<std::vector<OracleRow>()>;
  std::vector<Job> small, large;
  auto add = [&](int n, Job job) { (n >= 12 ? large : small).push_back(std::move(job)); };

  for (int n : sizes) {
    const auto points = sample_oracle_points(ctx.seed, n, count, margin);
    for (const auto& p : points) {
      add(n, [p, tol] {
        OracleRow r{"ground_qfi", params_json(p)};
        r.analytic = ground_qfi(p).total;
        r.oracle = oracle::fd_qfi_ground(p);
        r.rel_err = rel_error(r.analytic, r.oracle);
        r.pass = r.rel_err <= tol;
        return std::vector<OracleRow>{r};
      });
    }
    // spectrum and scale on the first unbroken and first broken point
    for (std::size_t k = 0; k < std::min<std::size_t>(2, points.size()); ++k) {
      const ModelParams p = points[k];
      add(n, [p, tol, corrupt] {
        std::vector<OracleRow> rows;
        OracleRow s{"scale_factor", params_json(p)};
        s.analytic = corrupt;
        s.oracle = oracle::calibrate_scale(p);
        s.rel_err = rel_error(s.analytic, s.oracle);
        s.pass = s.rel_err <= tol;
        rows.push_back(s);

        const auto dense = oracle::even_sector_eigenvalues(p);
        const auto predicted = oracle::block_spectrum_multiset(p);
        double dense_max = 0.0, pred_max = 0.0;
        for (const cplx& z : dense) dense_max = std::max(dense_max, std::abs(z));
        for (const cplx& z : predicted) pred_max = std::max(pred_max, corrupt * std::abs(z));
        OracleRow e{"even_spectrum", params_json(p)};
        e.analytic = pred_max;
        e.oracle = dense_max;
        e.rel_err = oracle::spectrum_mismatch(dense, predicted, corrupt) / std::max(1.0, dense_max);
        e.pass = e.rel_err <= tol;
        rows.push_back(e);
        return rows;
      });
    }
  }
  if (dynamics) {
    const double dyn_gamma = 0.5, dyn_k = 0.2;
    for (double h : {1.5, 0.5}) {
      for (double t : {0.5, 2.0, 5.0}) {
        const ModelParams p{h, dyn_gamma, dyn_k, dyn_n};
        add(dyn_n, [p, t, tol, corrupt] {
          OracleRow r{"dynamical_qfi", params_json(p)};
          r.params["t"] = t;
          r.params["phase"] = std::string(to_string(classify_phase(p).phase));
          r.analytic = dynamical_qfi(p, t);
          r.oracle = oracle::dense_evolution_qfi(p, t, 1e-5, corrupt);
          r.rel_err = rel_error(r.analytic, r.oracle);
          r.pass = r.rel_err <= tol;
          return std::vector<OracleRow>{r};
        });
      }
    }
  }

  auto run_jobs = [](const std::vector<Job>& jobs, unsigned workers) {
    return parallel_map(jobs.size(), workers,
                        [&](std::size_t i) { return attempt([&] { return jobs[i](); }); });
  };
  auto results = run_jobs(small, ctx.options.workers);
  auto serial = run_jobs(large, 1);
  results.insert(results.end(), std::make_move_iterator(serial.begin()),
                 std::make_move_iterator(serial.end()));

  ojson rows = ojson::array();
  std::set<std::string> failed;
  std::vector<std::pair<std::string, Failure>> errors;
  int index = 0;
  for (const auto& res : results) {
    const std::string id = "job" + std::to_string(index++);
    if (!res.value) {
      errors.emplace_back(id, res.failure);
      ctx.manifest.add_task(id, "failed", res.failure.message);
      continue;
    }
    ctx.manifest.add_task(id, "ok");
    for (const auto& r : *res.value) {
      if (!r.pass) failed.insert(r.name);
      rows.push_back({{"name", r.name},
                      {"params", r.params},
                      {"analytic", json_number(r.analytic)},
                      {"oracle", json_number(r.oracle)},
                      {"rel_err", json_number(r.rel_err)},
                      {"pass", r.pass}});
    }
  }
  ojson report;
  report["command"] = "oracle-check";
  report["seed"] = ctx.seed;
  report["tolerance"] = tol;
  report["pass"] = failed.empty() && errors.empty();
  report["failed_invariants"] = std::vector<std::string>(failed.begin(), failed.end());
  report["rows"] = std::move(rows);
  ctx.manifest.write_file("oracle_report.json", dump(report));

  const int code = report_failures(ctx, errors);
  if (code != kExitOk) return code;
  if (!failed.empty()) {
    for (const auto& name : failed) ctx.err << "oracle-check failed: " << name << '\n';
    return kExitOracle;
  }
  ctx.out << "oracle-check: " << report["rows"].size() << " checks passed\n";
  return kExitOk;
}

// --------------------------------------------------------------------- phase

int cmd_phase(Context& ctx) {
  const std::string sec = "phase";
  const int n = static_cast<int>(ctx.config.get_int_or(sec, "n", 4));
  const ModelParams p = read_params(ctx.config, sec, n);
  ojson j = phase_json(classify_phase(p));
  j["h"] = p.h;
  j["gamma"] = p.gamma;
  j["K"] = p.k_ksea;
  const std::string text = dump(j);
  ctx.manifest.write_file("phase.json", text);
  ctx.manifest.add_task("phase", "ok");
  ctx.out << text;
  return kExitOk;
}

using Handler = int (*)(Context&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"ground-qfi", cmd_ground_qfi}, {"dyn-qfi", cmd_dyn_qfi},
      {"sweep", cmd_sweep},           {"fit", cmd_fit},
      {"oracle-check", cmd_oracle_check}, {"phase", cmd_phase},
  };
  return table;
}

}  // namespace

unsigned resolve_workers(std::optional<unsigned> flag) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv(kWorkersEnv)) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v < 4096) return static_cast<unsigned>(v);
  }
  return default_workers();
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, h] : handlers()) v.push_back(name);
    return v;
  }();
  return names;
}

std::vector<ModelParams> sample_oracle_points(std::uint64_t seed, int n_sites, int count,
                                              double margin) {
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(n_sites)));
  // draw doubles from raw 53-bit integers so the stream is library-independent
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  constexpr double kStep = 1e-5;
  auto clear_of_zero = [&](const ModelParams& p) {
    for (double dh : {-kStep, 0.0, kStep}) {
      ModelParams q = p;
      q.h += dh;
      for (const auto& m : momentum_grid(q)) {
        if (std::abs(block_operator(q, m).eps_sq) < margin) return false;
      }
    }
    return true;
  };
  std::vector<ModelParams> out;
  for (int i = 0; i < count; ++i) {
    const bool want_broken = i % 2 == 1;
    bool found = false;
    for (int attempt_no = 0; attempt_no < 100000 && !found; ++attempt_no) {
      ModelParams p{uniform(0.05, 2.0), uniform(0.0, 1.0), uniform(0.0, 1.0), n_sites};
      const Phase phase = classify_phase(p).phase;
      if (want_broken) {
        if (phase != Phase::Broken) continue;
        bool imaginary = false;
        for (const auto& m : momentum_grid(p)) imaginary |= block_operator(p, m).eps_sq < 0.0;
        if (!imaginary) continue;
      } else if (phase != Phase::Unbroken) {
        continue;
      }
      if (!clear_of_zero(p)) continue;
      out.push_back(p);
      found = true;
    }
    if (!found) throw Error("could not sample an oracle point for N=" + std::to_string(n_sites));
  }
  return out;
}

int run_command(const std::string& name, const Config& config, const CommandOptions& options,
                std::ostream& out, std::ostream& err) {
  const auto it = handlers().find(name);
  if (it == handlers().end()) {
    err << "error: unknown command '" << name << "'\n";
    return kExitConfig;
  }
  std::uint64_t seed = 0;
  try {
    const auto version = config.get_int_or("run", "version", kConfigVersion);
    if (version != kConfigVersion) {
      throw ConfigError("unsupported config version " + std::to_string(version));
    }
    seed = options.seed ? *options.seed
                        : static_cast<std::uint64_t>(config.get_int_or("run", "seed", 0));
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  Config echo = config;
  echo.set("run", "version", std::to_string(kConfigVersion));
  echo.set("run", "seed", std::to_string(seed));
  std::optional<Manifest> manifest;
  try {
    manifest.emplace(options.out_dir, name, echo.serialize(), seed);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCompute;
  }

  Context ctx{config, options, *manifest, out, err, seed};
  int code = kExitOk;
  try {
    code = it->second(ctx);
  } catch (const ParameterError& e) {
    err << "config error: " << e.what() << '\n';
    code = kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    code = kExitCompute;
  }
  try {
    manifest->finish(code);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    if (code == kExitOk) code = kExitCompute;
  }
  return code;
}

}  // namespace nhqfi::io
