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

// Command-line front end. Usage:
//
//   nhqfi <command> [--config FILE] [--set section.key=value]... [--out DIR]
//         [--workers N] [--seed S] [--format csv|json]

#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "nhqfi/io/commands.hpp"

int main(int argc, char** argv) {
  using namespace nhqfi::io;

  CLI::App app{"QFI of the non-Hermitian XY chain with KSEA exchange"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "out";
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";

  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "Run configuration file");
    sub->add_option("--set", overrides, "Override one entry, section.key=value");
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--workers", workers, "Worker threads (default: $NHQFI_WORKERS or all cores)");
    sub->add_option("--seed", seed, "Seed, overrides [run] seed");
    sub->add_option("--format", format, "Table format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  Config config;
  try {
    if (!config_path.empty()) config = Config::load(config_path);
    for (const auto& o : overrides) config.apply_override(o);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  CommandOptions options;
  options.out_dir = out_dir;
  options.workers = resolve_workers(workers);
  options.seed = seed;
  options.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  return run_command(command, config, options, std::cout, std::cerr);
}
