// Copyright 2026 The Authors.
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

#ifndef LOADCLUST_CSV_HPP_
#define LOADCLUST_CSV_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace loadclust::csv {

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
// A trailing '\r' is dropped.
std::vector<std::string> split_line(std::string_view line);

// Quotes a field only when it contains a comma, quote or newline.
std::string quote(std::string_view field);

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

// Parses a complete field as a double; throws ArgumentError naming `what`.
double parse_double(std::string_view text, std::string_view what);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Reads a header plus rows, requiring every row to have the header's width.
// Blank lines are skipped.
Table read_table(const std::filesystem::path& path);
Table read_table(std::istream& in);

}  // namespace loadclust::csv

#endif  // LOADCLUST_CSV_HPP_
