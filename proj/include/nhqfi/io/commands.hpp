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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nhqfi/io/config.hpp"
#include "nhqfi/model.hpp"

namespace nhqfi::io {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCompute = 3;
inline constexpr int kExitOracle = 4;

enum class OutputFormat { Csv, Json };

struct CommandOptions {
  std::filesystem::path out_dir = "out";
  unsigned workers = 1;
  /// Overrides [run] seed when set.
  std::optional<std::uint64_t> seed;
  OutputFormat format = OutputFormat::Csv;
};

inline constexpr const char* kWorkersEnv = "NHQFI_WORKERS";

/// Flag value if given, else NHQFI_WORKERS, else the hardware thread count.
unsigned resolve_workers(std::optional<unsigned> flag);

const std::vector<std::string>& command_names();

/// Seeded random points for the dense cross-checks. Even-numbered points lie
/// in the unbroken phase, odd-numbered ones in the broken phase with at least
/// one imaginary-branch mode on the N-site grid. Points with any mode closer
/// than `margin` to eps^2 = 0 (at h and at h +- 1e-5) are rejected.
std::vector<ModelParams> sample_oracle_points(std::uint64_t seed, int n_sites, int count,
                                              double margin = 1e-8);

/// Runs one subcommand and returns its exit code. Data files and
/// manifest.json go to options.out_dir; human-readable progress goes to `out`,
/// diagnostics to `err`. Never throws.
int run_command(const std::string& name, const Config& config, const CommandOptions& options,
                std::ostream& out, std::ostream& err);

}  // namespace nhqfi::io
