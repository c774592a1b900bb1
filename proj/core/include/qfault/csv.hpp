/*
 *  Copyright 2026 The qfault Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace qfault {

using CsvValue = std::variant<std::int64_t, std::uint64_t, double, std::string>;
using CsvRow = std::vector<CsvValue>;

struct CsvSchema {
  std::vector<std::string> columns;
};

/// Reals are printed with up to 6 significant digits ("%.6g").
std::string format_number(double value);
std::string format_value(const CsvValue& value);

/// RFC-4180 CSV with a header line; fields containing commas, quotes or
/// newlines are quoted. Throws std::invalid_argument when a row's width
/// differs from the schema and std::runtime_error on I/O failure.
void write_csv(const std::vector<CsvRow>& rows, const CsvSchema& schema, const std::string& path);
std::string to_csv(const std::vector<CsvRow>& rows, const CsvSchema& schema);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws std::out_of_range.
  std::size_t column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

/// Writes `content` to `path` via a temporary file and rename.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace qfault
