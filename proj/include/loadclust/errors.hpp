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

#ifndef LOADCLUST_ERRORS_HPP_
#define LOADCLUST_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace loadclust {

// Root of every error the library throws. The CLI maps the three families
// (config, data, convergence) onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument or configuration supplied by the caller.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Input data that cannot be used as-is.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t row)
      : DataError(what + " (row " + std::to_string(row) + ")"), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class ValidationError : public DataError {
 public:
  using DataError::DataError;
};

// A column with too many missing cells.
class DataQualityError : public DataError {
 public:
  DataQualityError(const std::string& area, double missing_fraction)
      : DataError("area '" + area + "' has " +
                  std::to_string(missing_fraction * 100.0) +
                  "% missing cells (limit 20%)"),
        area_(area) {}
  const std::string& area() const { return area_; }

 private:
  std::string area_;
};

class FeatureError : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateDataError : public DataError {
 public:
  using DataError::DataError;
};

// Index undefined for the requested partition (k == 1 or k == N).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// Brute-force oracle refused an instance that is too large.
class GuardError : public Error {
 public:
  using Error::Error;
};

}  // namespace loadclust

#endif  // LOADCLUST_ERRORS_HPP_
