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
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nhqfi::io {

/// Seventeen significant digits, '.' decimal point, independent of locale.
/// Non-finite values print as inf, -inf and nan.
std::string format_double(double value);

using Cell = std::variant<double, std::int64_t, bool, std::string>;

/// A rectangular result table that renders either as RFC-4180 CSV (header
/// row, '\n' line endings) or as a JSON array of row objects.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  /// Throws std::invalid_argument if the row width does not match.
  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  std::string to_csv() const;
  std::string to_json() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// Quotes a CSV field when it contains ',', '"', '\r' or '\n'.
std::string csv_escape(std::string_view field);

struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws std::out_of_range when missing.
  std::size_t column(const std::string& name) const;
};

CsvData parse_csv(std::string_view text);
CsvData read_csv(const std::filesystem::path& path);

std::string sha256_hex(std::string_view data);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

struct TaskStatus {
  std::string id;
  std::string status;  // "ok", "failed" or "skipped"
  std::string message;
};

struct FileRecord {
  std::string path;  // relative to the output directory
  std::uint64_t bytes = 0;
  std::string sha256;
};

/// Writes result files into one output directory and keeps the run record.
/// The manifest itself (manifest.json) carries timestamps and is therefore
/// not part of any byte-for-byte reproducibility comparison.
class Manifest {
 public:
  Manifest(std::filesystem::path out_dir, std::string command, std::string config_text,
           std::uint64_t seed);

  /// Writes `content` to out_dir/name and records its digest.
  void write_file(const std::string& name, std::string_view content);
  void add_task(std::string id, std::string status, std::string message = {});

  const std::vector<TaskStatus>& tasks() const { return tasks_; }
  const std::vector<FileRecord>& files() const { return files_; }
  const std::filesystem::path& out_dir() const { return out_dir_; }

  /// Writes manifest.json with the exit code and the finish time.
  void finish(int exit_code);

 private:
  std::filesystem::path out_dir_;
  std::string command_;
  std::string config_text_;
  std::uint64_t seed_;
  std::string started_;
  std::vector<TaskStatus> tasks_;
  std::vector<FileRecord> files_;
};

inline constexpr const char* kManifestName = "manifest.json";

}  // namespace nhqfi::io
