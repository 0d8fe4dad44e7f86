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

#include "loadclust/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>

#include "loadclust/csv.hpp"
#include "loadclust/errors.hpp"

namespace loadclust {
namespace {

bool is_missing(std::string_view cell) {
  while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
  while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan";
}

int read_digits(std::string_view text, std::size_t pos, std::size_t count) {
  if (pos + count > text.size()) return -1;
  int value = 0;
  auto [end, ec] = std::from_chars(text.data() + pos, text.data() + pos + count, value);
  if (ec != std::errc() || end != text.data() + pos + count) return -1;
  return value;
}

// Fills missing entries of one column in place; returns the count filled.
std::size_t fill_gaps(std::vector<std::optional<double>>& cells,
                      const std::vector<Timestamp>& times) {
  const std::size_t n = cells.size();
  std::size_t filled = 0;
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < n; ++i) {
    if (cells[i]) {
      prev = i;
      continue;
    }
    std::size_t next = i;
    while (next < n && !cells[next]) ++next;
    for (std::size_t k = i; k < next; ++k) {
      if (prev && next < n) {
        const double t0 = static_cast<double>(times[*prev].time_since_epoch().count());
        const double t1 = static_cast<double>(times[next].time_since_epoch().count());
        const double t = static_cast<double>(times[k].time_since_epoch().count());
        const double a = (t - t0) / (t1 - t0);
        cells[k] = (1.0 - a) * *cells[*prev] + a * *cells[next];
      } else if (prev) {
        cells[k] = *cells[*prev];
      } else {
        cells[k] = *cells[next];
      }
      ++filled;
    }
    i = next - 1;
  }
  return filled;
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
  const auto bad = [&] {
    return ArgumentError("invalid ISO-8601 datetime '" + std::string(text) + "'");
  };
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') throw bad();
  const int y = read_digits(text, 0, 4);
  const int mo = read_digits(text, 5, 2);
  const int d = read_digits(text, 8, 2);
  int hh = 0, mm = 0, ss = 0;
  if (text.size() > 10) {
    if ((text[10] != 'T' && text[10] != ' ') || (text.size() != 16 && text.size() != 19) ||
        text[13] != ':') {
      throw bad();
    }
    hh = read_digits(text, 11, 2);
    mm = read_digits(text, 14, 2);
    if (text.size() == 19) {
      if (text[16] != ':') throw bad();
      ss = read_digits(text, 17, 2);
    }
  }
  if (y < 0 || mo < 0 || d < 0 || hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 ||
      ss > 59) {
    throw bad();
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw bad();
  return std::chrono::sys_days{ymd} + std::chrono::hours{hh} + std::chrono::minutes{mm} +
         std::chrono::seconds{ss};
}

std::string format_timestamp(Timestamp t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

void validate(const LoadMatrix& m) {
  if (static_cast<Eigen::Index>(m.timestamps.size()) != m.rows()) {
    throw ValidationError("timestamp count does not match row count");
  }
  if (static_cast<Eigen::Index>(m.area_ids.size()) != m.cols()) {
    throw ValidationError("area id count does not match column count");
  }
  for (std::size_t i = 1; i < m.timestamps.size(); ++i) {
    if (m.timestamps[i] <= m.timestamps[i - 1]) {
      throw ValidationError("timestamps not strictly increasing at " +
                            format_timestamp(m.timestamps[i]));
    }
  }
  if (!m.values.allFinite()) throw ValidationError("non-finite load value");
  if (m.normalized) {
    if (static_cast<Eigen::Index>(m.scalers.size()) != m.cols()) {
      throw ValidationError("normalized matrix without scalers");
    }
    if (m.values.size() > 0 && (m.values.minCoeff() < 0.0 || m.values.maxCoeff() > 1.0)) {
      throw ValidationError("normalized values outside [0, 1]");
    }
  }
}

LoadedProfiles parse_profiles(std::istream& in, const CsvSchema& schema) {
  const csv::Table table = csv::read_table(in);
  if (table.header.size() < 2) throw ParseError("need a timestamp column and an area", 1);

  std::size_t ts_col = 0;
  if (!schema.timestamp_column.empty()) {
    auto it = std::find(table.header.begin(), table.header.end(), schema.timestamp_column);
    if (it == table.header.end()) {
      throw ArgumentError("timestamp column '" + schema.timestamp_column + "' not found");
    }
    ts_col = static_cast<std::size_t>(it - table.header.begin());
  }
  std::vector<std::size_t> cols;
  if (schema.areas.empty()) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (c != ts_col) cols.push_back(c);
    }
  } else {
    for (const auto& area : schema.areas) {
      auto it = std::find(table.header.begin(), table.header.end(), area);
      if (it == table.header.end()) throw ArgumentError("area column '" + area + "' not found");
      cols.push_back(static_cast<std::size_t>(it - table.header.begin()));
    }
  }
  if (table.rows.empty()) throw ParseError("no data rows", 2);

  LoadMatrix m;
  for (auto c : cols) m.area_ids.push_back(table.header[c]);
  const std::size_t t_count = table.rows.size();
  m.timestamps.reserve(t_count);
  std::vector<std::vector<std::optional<double>>> cells(
      cols.size(), std::vector<std::optional<double>>(t_count));

  // Data rows are reported with 1-based line numbers counting the header.
  for (std::size_t r = 0; r < t_count; ++r) {
    const auto& row = table.rows[r];
    try {
      m.timestamps.push_back(parse_timestamp(row[ts_col]));
    } catch (const ArgumentError& e) {
      throw ParseError(e.what(), r + 2);
    }
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto& cell = row[cols[k]];
      if (is_missing(cell)) continue;
      double v = 0.0;
      try {
        v = csv::parse_double(cell, m.area_ids[k]);
      } catch (const ArgumentError& e) {
        throw ParseError(e.what(), r + 2);
      }
      if (!std::isfinite(v)) throw ParseError("non-finite value in " + m.area_ids[k], r + 2);
      cells[k][r] = v;
    }
  }
  for (std::size_t i = 1; i < t_count; ++i) {
    if (m.timestamps[i] == m.timestamps[i - 1]) {
      throw ValidationError("duplicate timestamp " + format_timestamp(m.timestamps[i]) +
                            " at row " + std::to_string(i + 2));
    }
    if (m.timestamps[i] < m.timestamps[i - 1]) {
      throw ValidationError("timestamps out of order at row " + std::to_string(i + 2));
    }
  }

  LoadedProfiles out;
  out.summary.filled_per_area.resize(cols.size());
  m.values.resize(static_cast<Eigen::Index>(t_count), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const auto missing = static_cast<std::size_t>(
        std::count_if(cells[k].begin(), cells[k].end(), [](const auto& c) { return !c; }));
    const double fraction = static_cast<double>(missing) / static_cast<double>(t_count);
    if (fraction > schema.max_missing_fraction || missing == t_count) {
      throw DataQualityError(m.area_ids[k], fraction);
    }
    const std::size_t filled = fill_gaps(cells[k], m.timestamps);
    out.summary.filled_per_area[k] = filled;
    out.summary.filled_cells += filled;
    for (std::size_t r = 0; r < t_count; ++r) {
      m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = *cells[k][r];
    }
  }
  validate(m);
  out.matrix = std::move(m);
  return out;
}

LoadedProfiles load_profiles(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open input file " + path.string());
  return parse_profiles(in, schema);
}

NormalizedProfiles normalize(const LoadMatrix& m) {
  if (m.normalized) throw ArgumentError("matrix is already normalized");
  if (!m.values.allFinite()) throw ArgumentError("cannot normalize non-finite values");
  NormalizedProfiles out;
  out.matrix = m;
  out.matrix.normalized = true;
  out.matrix.scalers.resize(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double lo = m.values.col(c).minCoeff();
    const double hi = m.values.col(c).maxCoeff();
    out.matrix.scalers[static_cast<std::size_t>(c)] = {lo, hi};
    if (hi == lo) {
      out.matrix.values.col(c).setZero();
      out.warnings.push_back("area '" + m.area_ids[static_cast<std::size_t>(c)] +
                             "' is constant; normalized to zeros");
      continue;
    }
    const double range = hi - lo;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      out.matrix.values(r, c) = (m.values(r, c) - lo) / range;
    }
  }
  return out;
}

Eigen::MatrixXd denormalize(const LoadMatrix& m) {
  if (!m.normalized) throw ArgumentError("matrix is not normalized");
  Eigen::MatrixXd raw(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const Scaler& s = m.scalers[static_cast<std::size_t>(c)];
    raw.col(c) = (m.values.col(c).array() * (s.max - s.min) + s.min).matrix();
  }
  return raw;
}

void write_profiles(std::ostream& out, const std::vector<Timestamp>& timestamps,
                    const Eigen::MatrixXd& values, const std::vector<std::string>& area_ids) {
  out << "timestamp";
  for (const auto& id : area_ids) out << ',' << csv::quote(id);
  out << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    out << format_timestamp(timestamps[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      out << ',' << csv::format_double(values(r, c));
    }
    out << '\n';
  }
}

}  // namespace loadclust
