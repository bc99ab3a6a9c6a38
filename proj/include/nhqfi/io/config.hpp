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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nhqfi/errors.hpp"

// Line-oriented run configuration.
//
//   # comment
//   [section]
//   key = value
//
// Values are scalars, comma-separated lists, or grid generators:
//   lin(lo, hi, n)      n evenly spaced values, endpoints included
//   geom(lo, hi, n)     n geometrically spaced values, endpoints included
//   evengeom(lo, hi, n) geom rounded to even integers, duplicates dropped
//   octaves(lo, hi)     lo, 2 lo, 4 lo, ... <= hi
// Keys are case-sensitive; whitespace around keys, values and list items is
// ignored. A key may appear once per section.

namespace nhqfi::io {

class ConfigError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

inline constexpr int kConfigVersion = 1;

class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  /// Canonical text form; parse(serialize()) == *this.
  std::string serialize() const;

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

  /// Applies "section.key=value".
  void apply_override(std::string_view assignment);

  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key) const;
  std::int64_t get_int_or(const std::string& section, const std::string& key,
                          std::int64_t fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;

  /// Expands lists and generators. Throws ConfigError on an empty result.
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
  /// As get_doubles, requiring every value to be an integer.
  std::vector<int> get_ints(const std::string& section, const std::string& key) const;

  std::vector<std::string> sections() const;

  bool operator==(const Config&) const = default;

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
};

/// Parses one value (scalar, list or generator) into numbers.
std::vector<double> expand_values(std::string_view value);

}  // namespace nhqfi::io
