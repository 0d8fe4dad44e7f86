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

#ifndef LOADCLUST_FEATURES_HPP_
#define LOADCLUST_FEATURES_HPP_

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "loadclust/io.hpp"

namespace loadclust {

// Calendar-month split of the year into two seasons. The default is
// June-September summer, October-May winter.
struct SeasonConfig {
  std::vector<unsigned> summer_months{6, 7, 8, 9};
  std::vector<unsigned> winter_months{10, 11, 12, 1, 2, 3, 4, 5};

  // Throws ArgumentError unless the sets are disjoint and cover 1..12.
  void validate() const;
};

struct SeasonMasks {
  std::vector<Eigen::Index> summer;
  std::vector<Eigen::Index> winter;
};

SeasonMasks season_mask(const std::vector<Timestamp>& timestamps, const SeasonConfig& cfg);

inline constexpr std::size_t kFeatureCount = 16;

// Fixed layout, grouped by component then season:
//   [0..3]   low-rank summer  (mean, std, max, min)
//   [4..7]   low-rank winter
//   [8..11]  sparse summer
//   [12..15] sparse winter
// std is the population form (divide by count).
struct FeatureVector {
  std::array<double, kFeatureCount> values{};
  std::string area_id;
};

// e.g. "low_rank.summer.mean"
std::string feature_name(std::size_t index);

// Text for the sidecar file that documents the column order of a feature table.
std::string feature_order_description();

FeatureVector extract_features(const Eigen::Ref<const Eigen::VectorXd>& low_rank_col,
                               const Eigen::Ref<const Eigen::VectorXd>& sparse_col,
                               const SeasonMasks& masks, std::string area_id);

std::vector<FeatureVector> extract_all(const Eigen::MatrixXd& low_rank,
                                       const Eigen::MatrixXd& sparse, const SeasonMasks& masks,
                                       const std::vector<std::string>& area_ids);

// N x 16, one row per area.
Eigen::MatrixXd feature_matrix(const std::vector<FeatureVector>& features);

}  // namespace loadclust

#endif  // LOADCLUST_FEATURES_HPP_
