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

#ifndef LOADCLUST_IO_HPP_
#define LOADCLUST_IO_HPP_

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace loadclust {

using Timestamp = std::chrono::sys_seconds;

// Column extrema recorded at normalization time, in the raw unit (MW).
struct Scaler {
  double min = 0.0;
  double max = 0.0;
  bool constant() const { return max == min; }
};

// T x N load profiles, one column per area. Raw values are in MW; after
// normalize() every column lies in [0, 1].
struct LoadMatrix {
  std::vector<Timestamp> timestamps;
  Eigen::MatrixXd values;
  std::vector<std::string> area_ids;
  bool normalized = false;
  std::vector<Scaler> scalers;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

// Throws ValidationError when any LoadMatrix invariant is broken.
void validate(const LoadMatrix& m);

// Which columns of the input CSV to read. By default the first column is
// the timestamp and every other column is an area.
struct CsvSchema {
  std::string timestamp_column;     // empty: first column
  std::vector<std::string> areas;   // empty: all remaining columns
  double max_missing_fraction = 0.2;
};

struct IngestionSummary {
  std::size_t filled_cells = 0;
  std::vector<std::size_t> filled_per_area;
};

struct LoadedProfiles {
  LoadMatrix matrix;
  IngestionSummary summary;
};

// Reads a wide CSV (`timestamp,<area_id>,...`). Empty, "NA" and "NaN" cells
// are missing: interior gaps are linearly interpolated in time, leading and
// trailing gaps take the nearest observed value.
LoadedProfiles load_profiles(const std::filesystem::path& path,
                             const CsvSchema& schema = {});
LoadedProfiles parse_profiles(std::istream& in, const CsvSchema& schema = {});

struct NormalizedProfiles {
  LoadMatrix matrix;
  std::vector<std::string> warnings;
};

// Min-max scaling per column, y = (x - X_min) / (X_max - X_min).
// A constant column maps to zeros and produces a warning.
NormalizedProfiles normalize(const LoadMatrix& m);

// Inverse of normalize() using the stored scalers.
Eigen::MatrixXd denormalize(const LoadMatrix& m);

// Accepts `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM[:SS]` or the same with a space
// separator, optionally suffixed by `Z`. Offsets are rejected.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

// Writes matrix columns in the ingestion layout so outputs can be re-read.
void write_profiles(std::ostream& out, const std::vector<Timestamp>& timestamps,
                    const Eigen::MatrixXd& values,
                    const std::vector<std::string>& area_ids);

}  // namespace loadclust

#endif  // LOADCLUST_IO_HPP_
