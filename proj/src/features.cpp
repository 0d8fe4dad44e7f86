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

#include "loadclust/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "loadclust/errors.hpp"

namespace loadclust {
namespace {

constexpr std::array<const char*, 2> kComponents{"low_rank", "sparse"};
constexpr std::array<const char*, 2> kSeasons{"summer", "winter"};
constexpr std::array<const char*, 4> kStats{"mean", "std", "max", "min"};

struct BlockStats {
  double mean, std, max, min;
};

BlockStats block_stats(const Eigen::Ref<const Eigen::VectorXd>& col,
                       const std::vector<Eigen::Index>& idx) {
  // Sum in ascending index order so that the result does not depend on how
  // the mask was built.
  std::vector<Eigen::Index> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double sum = 0.0;
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (auto i : sorted) {
    const double x = col(i);
    sum += x;
    hi = std::max(hi, x);
    lo = std::min(lo, x);
  }
  const double mean = std::clamp(sum / n, lo, hi);
  double ss = 0.0;
  for (auto i : sorted) {
    const double e = col(i) - mean;
    ss += e * e;
  }
  return {mean, std::sqrt(ss / n), hi, lo};
}

}  // namespace

void SeasonConfig::validate() const {
  std::array<int, 13> seen{};
  for (auto mo : summer_months) {
    if (mo < 1 || mo > 12) throw ArgumentError("summer month out of range: " + std::to_string(mo));
    ++seen[mo];
  }
  for (auto mo : winter_months) {
    if (mo < 1 || mo > 12) throw ArgumentError("winter month out of range: " + std::to_string(mo));
    ++seen[mo];
  }
  for (unsigned mo = 1; mo <= 12; ++mo) {
    if (seen[mo] != 1) {
      throw ArgumentError("month " + std::to_string(mo) +
                          (seen[mo] == 0 ? " is in neither season" : " is listed twice"));
    }
  }
}

SeasonMasks season_mask(const std::vector<Timestamp>& timestamps, const SeasonConfig& cfg) {
  cfg.validate();
  if (timestamps.empty()) throw ArgumentError("season_mask: no timestamps");
  std::array<bool, 13> summer{};
  for (auto mo : cfg.summer_months) summer[mo] = true;
  SeasonMasks masks;
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    const std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(timestamps[i])};
    const auto idx = static_cast<Eigen::Index>(i);
    if (summer[static_cast<unsigned>(ymd.month())]) {
      masks.summer.push_back(idx);
    } else {
      masks.winter.push_back(idx);
    }
  }
  return masks;
}

std::string feature_name(std::size_t index) {
  if (index >= kFeatureCount) throw ArgumentError("feature index out of range");
  return std::string(kComponents[index / 8]) + "." + kSeasons[(index / 4) % 2] + "." +
         kStats[index % 4];
}

std::string feature_order_description() {
  std::ostringstream out;
  out << "Feature columns f01..f16 (dimensionless, from min-max normalized load):\n";
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    out << 'f' << (i < 9 ? "0" : "") << (i + 1) << ' ' << feature_name(i) << '\n';
  }
  out << "std is the population standard deviation (divide by sample count).\n";
  return out.str();
}

FeatureVector extract_features(const Eigen::Ref<const Eigen::VectorXd>& low_rank_col,
                               const Eigen::Ref<const Eigen::VectorXd>& sparse_col,
                               const SeasonMasks& masks, std::string area_id) {
  const auto expected = static_cast<Eigen::Index>(masks.summer.size() + masks.winter.size());
  if (low_rank_col.size() != expected || sparse_col.size() != expected) {
    throw ArgumentError("extract_features: column length does not match season masks");
  }
  if (masks.summer.empty()) throw FeatureError("summer season has no samples");
  if (masks.winter.empty()) throw FeatureError("winter season has no samples");
  FeatureVector fv;
  fv.area_id = std::move(area_id);
  std::size_t k = 0;
  for (const auto* col : {&low_rank_col, &sparse_col}) {
    for (const auto* idx : {&masks.summer, &masks.winter}) {
      const BlockStats s = block_stats(*col, *idx);
      fv.values[k++] = s.mean;
      fv.values[k++] = s.std;
      fv.values[k++] = s.max;
      fv.values[k++] = s.min;
    }
  }
  return fv;
}

std::vector<FeatureVector> extract_all(const Eigen::MatrixXd& low_rank,
                                       const Eigen::MatrixXd& sparse, const SeasonMasks& masks,
                                       const std::vector<std::string>& area_ids) {
  if (low_rank.rows() != sparse.rows() || low_rank.cols() != sparse.cols() ||
      static_cast<Eigen::Index>(area_ids.size()) != low_rank.cols()) {
    throw ArgumentError("extract_all: shape mismatch between components and area ids");
  }
  std::vector<FeatureVector> out;
  out.reserve(area_ids.size());
  for (Eigen::Index c = 0; c < low_rank.cols(); ++c) {
    out.push_back(extract_features(low_rank.col(c), sparse.col(c), masks,
                                   area_ids[static_cast<std::size_t>(c)]));
  }
  return out;
}

Eigen::MatrixXd feature_matrix(const std::vector<FeatureVector>& features) {
  Eigen::MatrixXd z(static_cast<Eigen::Index>(features.size()),
                    static_cast<Eigen::Index>(kFeatureCount));
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = features[i].values[f];
    }
  }
  return z;
}

}  // namespace loadclust
