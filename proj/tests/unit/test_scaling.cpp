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
#include <stdexcept>

#include "doctest.h"
#include "nhqfi/errors.hpp"
#include "nhqfi/parallel.hpp"
#include "nhqfi/scaling.hpp"

using namespace nhqfi;

TEST_SUITE("scaling") {

TEST_CASE("power-law fit on synthetic data") {
  std::vector<double> xs, ys, ys6, ys_scaled;
  for (double x = 2.0; x <= 200.0; x *= 1.5) {
    xs.push_back(x);
    ys.push_back(7.0 * x * x);
    ys6.push_back(std::pow(x, 6) * (1.0 + 0.01 * std::sin(x)));
  }
  const auto f = power_law_fit(xs, ys);
  CHECK(f.exponent == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(f.intercept == doctest::Approx(std::log(7.0)).epsilon(1e-10));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK_FALSE(f.low_quality);
  CHECK(f.n_points == static_cast<int>(xs.size()));

  const auto f6 = power_law_fit(xs, ys6);
  CHECK(f6.exponent >= 5.99);
  CHECK(f6.exponent <= 6.01);

  for (double y : ys6) ys_scaled.push_back(123.4 * y);
  const auto fs = power_law_fit(xs, ys_scaled);
  CHECK(std::abs(fs.exponent - f6.exponent) <= 1e-12);
  CHECK(fs.intercept == doctest::Approx(f6.intercept + std::log(123.4)));

  const auto w = power_law_fit(xs, ys, {10.0, 100.0});
  CHECK(w.window_min >= 10.0);
  CHECK(w.window_max <= 100.0);
  CHECK(w.n_points < f.n_points);
}

TEST_CASE("power-law fit errors and quality flag") {
  CHECK_THROWS_AS((power_law_fit({1, 2, 3}, {1, 0, 3})), DomainError);
  CHECK_THROWS_AS((power_law_fit({1, 2, 3}, {1, -2, 3})), DomainError);
  CHECK_THROWS_AS((power_law_fit({1, 2}, {1, 2})), InsufficientDataError);
  CHECK_THROWS_AS((power_law_fit({1, 2, 3, 4}, {1, 2, 3, 4}, {2.5, 10.0})), InsufficientDataError);
  CHECK_THROWS_AS((power_law_fit({1, 2, 3}, {1, 2})), ParameterError);
  // points outside the window may be anything
  CHECK_NOTHROW(power_law_fit({0, 1, 2, 3}, {-1, 1, 4, 9}, {1.0, 3.0}));

  const auto noisy = power_law_fit({1, 2, 3, 4, 5, 6}, {1, 9, 2, 20, 3, 40});
  CHECK(noisy.low_quality);
  CHECK(noisy.r_squared < kLowQualityR2);
}

TEST_CASE("grids") {
  CHECK(octave_sizes(1024, 16384) == std::vector<int>{1024, 2048, 4096, 8192, 16384});
  const auto g = geometric_grid(10.0, 100.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 10.0);
  CHECK(g.back() == 100.0);
  CHECK(g[2] == doctest::Approx(std::sqrt(1000.0)));
  const auto e = even_size_grid(200, 2000, 8);
  CHECK(e.front() == 200);
  CHECK(e.back() == 2000);
  for (std::size_t i = 0; i < e.size(); ++i) {
    CHECK(e[i] % 2 == 0);
    if (i) CHECK(e[i] > e[i - 1]);
  }
  CHECK_THROWS_AS(geometric_grid(1.0, 1.0, 3), ParameterError);
}

TEST_CASE("Heisenberg scaling at the critical field") {
  const auto r = qfi_vs_size({1.0, 0.2, 0.5, 4}, octave_sizes(1024, 16384), 2);
  CHECK(r.variable == "N");
  const auto fit = power_law_fit(r.axis, r.values);
  CHECK(fit.exponent >= 1.95);
  CHECK(fit.exponent <= 2.05);
}

TEST_CASE("window exponent settles onto the plateau") {
  double prev = INFINITY;
  for (int n0 : {64, 128, 256, 512}) {
    const auto r = qfi_vs_size({1.0, 0.2, 0.5, 4}, {n0, 2 * n0, 4 * n0});
    const double dev = std::abs(power_law_fit(r.axis, r.values).exponent - 2.0);
    CHECK(dev < prev);
    prev = dev;
  }
}

TEST_CASE("sweeps are independent of the worker count") {
  const std::vector<int> sizes{64, 128, 256, 512, 1024};
  const auto a = qfi_vs_size({1.0, 0.2, 0.5, 4}, sizes, 1);
  const auto b = qfi_vs_size({1.0, 0.2, 0.5, 4}, sizes, 4);
  CHECK(a.values == b.values);
  const auto c = kappa_sweep(0.5, {1e-6, 1e-5}, {200, 400, 800}, {1.0, true, 1});
  const auto d = kappa_sweep(0.5, {1e-6, 1e-5}, {200, 400, 800}, {1.0, true, 3});
  CHECK(c.values == d.values);
}

TEST_CASE("exponent versus field offset") {
  const std::vector<int> sizes = octave_sizes(1024, 16384);
  const auto away = exponent_vs_offset({0.0, 0.2, 0.5, 4}, {0.1}, sizes, FieldAnchor::Critical);
  CHECK(away.values.front() < 2.0);
  CHECK(away.flags.front().empty());

  const auto crossed =
      exponent_vs_offset({0.0, 0.5, 0.2, 4}, {0.2}, sizes, FieldAnchor::Critical);
  CHECK(crossed.flags.front() == "phase_changed:unbroken");

  CHECK_THROWS_AS((exponent_vs_offset({0.0, 0.2, 0.5, 4}, {0.1}, sizes, FieldAnchor::Exceptional)),
                  ParameterError);
  CHECK_THROWS_AS((exponent_vs_offset({0.0, 0.2, 0.5, 4}, {0.1, 0.01}, sizes, FieldAnchor::Critical)),
                  ParameterError);

  // N^2 close to the critical point, N far from it, with a crossover in between
  const auto near = exponent_vs_offset({0.0, 0.2, 0.5, 4}, {1e-5, 1e-4, 1e-1}, sizes,
                                       FieldAnchor::Critical);
  CHECK(near.values[0] > 1.9);
  CHECK(near.values[0] > near.values[1]);
  CHECK(near.values[1] > near.values[2]);
  CHECK(near.values[2] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("kappa sweep") {
  CHECK_THROWS_AS((kappa_sweep(0.5, {0.0}, {200, 400, 800})), ParameterError);
  try {
    kappa_sweep(0.5, {1e-6, 0.3}, {1024, 2048});
    FAIL("expected WindowError");
  } catch (const WindowError& e) {
    CHECK(std::string(e.what()).find("N=1024") != std::string::npos);
  }

  KappaSweepOptions opt;
  opt.enforce_window = false;
  const auto far = kappa_sweep(0.5, {0.3}, octave_sizes(1024, 16384), opt);
  CHECK(far.values.front() == doctest::Approx(2.0).epsilon(0.025));
  CHECK(far.flags.front().find("out_of_window:N=1024") != std::string::npos);
}

TEST_CASE("parallel map keeps order and reports the first failure") {
  const auto v = parallel_map(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<int>(i * i));
  try {
    parallel_map(50, 4, [](std::size_t i) -> int {
      if (i == 7 || i == 31) throw std::runtime_error("task " + std::to_string(i));
      return 0;
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "task 7");
  }
}

}  // TEST_SUITE
