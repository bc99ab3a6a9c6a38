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

#include "nhqfi/io/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nhqfi::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (s.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::vector<double> expand_values(std::string_view value) {
  value = trim(value);
  auto generator_args = [&](std::string_view name) -> std::optional<std::vector<std::string_view>> {
    if (value.size() > name.size() + 1 && value.substr(0, name.size()) == name &&
        value[name.size()] == '(' && value.back() == ')') {
      return split(value.substr(name.size() + 1, value.size() - name.size() - 2), ',');
    }
    return std::nullopt;
  };
  if (auto args = generator_args("lin")) {
    if (args->size() != 3) throw ConfigError("lin(lo, hi, n) takes three arguments");
    const double lo = parse_number((*args)[0]);
    const double hi = parse_number((*args)[1]);
    const double n = parse_number((*args)[2]);
    if (n < 1 || n != std::floor(n)) throw ConfigError("lin: n must be a positive integer");
    if (n == 1) return {lo};
    std::vector<double> out;
    for (int i = 0; i < static_cast<int>(n); ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
    out.back() = hi;
    return out;
  }
  if (auto args = generator_args("geom")) {
    if (args->size() != 3) throw ConfigError("geom(lo, hi, n) takes three arguments");
    const double lo = parse_number((*args)[0]);
    const double hi = parse_number((*args)[1]);
    const double n = parse_number((*args)[2]);
    if (!(lo > 0.0) || !(hi > 0.0) || n < 2 || n != std::floor(n)) {
      throw ConfigError("geom: need lo, hi > 0 and integer n >= 2");
    }
    std::vector<double> out;
    const double r = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < static_cast<int>(n); ++i) out.push_back(lo * std::exp(r * i));
    out.front() = lo;
    out.back() = hi;
    return out;
  }
  if (auto args = generator_args("evengeom")) {
    if (args->size() != 3) throw ConfigError("evengeom(lo, hi, n) takes three arguments");
    std::vector<double> out;
    for (double x : expand_values("geom(" + std::string((*args)[0]) + "," +
                                  std::string((*args)[1]) + "," + std::string((*args)[2]) +
                                  ")")) {
      const double v = 2.0 * std::round(x / 2.0);
      if (out.empty() || v > out.back()) out.push_back(v);
    }
    return out;
  }
  if (auto args = generator_args("octaves")) {
    if (args->size() != 2) throw ConfigError("octaves(lo, hi) takes two arguments");
    const double lo = parse_number((*args)[0]);
    const double hi = parse_number((*args)[1]);
    if (!(lo > 0.0)) throw ConfigError("octaves: lo must be positive");
    std::vector<double> out;
    for (double x = lo; x <= hi; x *= 2.0) out.push_back(x);
    return out;
  }
  std::vector<double> out;
  if (value.empty()) return out;
  for (auto item : split(value, ',')) out.push_back(parse_number(item));
  return out;
}

Config Config::parse(std::string_view text) {
  Config cfg;
  std::string section;
  int line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!valid_name(section)) throw ConfigError(where + "invalid section name");
      cfg.data_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "entry outside of any [section]");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!valid_name(key)) throw ConfigError(where + "invalid key '" + key + "'");
    auto& sec = cfg.data_[section];
    if (sec.count(key)) throw ConfigError(where + "duplicate key '" + key + "'");
    sec[key] = value;
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string Config::serialize() const {
  std::string out;
  bool first = true;
  for (const auto& [name, entries] : data_) {
    if (!first) out += '\n';
    first = false;
    out += '[' + name + "]\n";
    for (const auto& [k, v] : entries) out += k + " = " + v + '\n';
  }
  return out;
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto it = data_.find(section);
  return it != data_.end() && it->second.count(key) > 0;
}

bool Config::has_section(const std::string& section) const { return data_.count(section) > 0; }

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  if (!valid_name(section) || !valid_name(key)) {
    throw ConfigError("invalid section or key name: " + section + "." + key);
  }
  if (value.find('\n') != std::string::npos) throw ConfigError("values cannot span lines");
  data_[section][key] = std::string(trim(value));
}

void Config::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
    throw ConfigError("override must look like section.key=value, got '" +
                      std::string(assignment) + "'");
  }
  set(std::string(trim(assignment.substr(0, dot))),
      std::string(trim(assignment.substr(dot + 1, eq - dot - 1))),
      std::string(assignment.substr(eq + 1)));
}

std::string Config::get(const std::string& section, const std::string& key) const {
  const auto it = data_.find(section);
  if (it == data_.end() || !it->second.count(key)) {
    throw ConfigError("missing required key [" + section + "] " + key);
  }
  return it->second.at(key);
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  try {
    return parse_number(get(section, key));
  } catch (const ConfigError& e) {
    throw ConfigError("[" + section + "] " + key + ": " + e.what());
  }
}

double Config::get_double_or(const std::string& section, const std::string& key,
                             double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

std::int64_t Config::get_int(const std::string& section, const std::string& key) const {
  const double v = get_double(section, key);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) {
    throw ConfigError("[" + section + "] " + key + ": expected an integer");
  }
  return static_cast<std::int64_t>(v);
}

std::int64_t Config::get_int_or(const std::string& section, const std::string& key,
                                std::int64_t fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool_or(const std::string& section, const std::string& key,
                         bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("[" + section + "] " + key + ": expected true or false");
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  try {
    out = expand_values(get(section, key));
  } catch (const ConfigError& e) {
    throw ConfigError("[" + section + "] " + key + ": " + e.what());
  }
  if (out.empty()) throw ConfigError("[" + section + "] " + key + ": empty grid");
  return out;
}

std::vector<int> Config::get_ints(const std::string& section, const std::string& key) const {
  std::vector<int> out;
  for (double v : get_doubles(section, key)) {
    const double r = std::round(v);
    // generators produce integers up to rounding
    if (std::abs(v - r) > 1e-9 * std::max(1.0, std::abs(v)) || std::abs(r) > 2.0e9) {
      throw ConfigError("[" + section + "] " + key + ": expected integers");
    }
    out.push_back(static_cast<int>(r));
  }
  return out;
}

std::vector<std::string> Config::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, entries] : data_) out.push_back(name);
  return out;
}

}  // namespace nhqfi::io
