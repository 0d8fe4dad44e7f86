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

#ifndef LOADCLUST_SIMILARITY_HPP_
#define LOADCLUST_SIMILARITY_HPP_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "loadclust/features.hpp"

namespace loadclust {

// d_ij = ||z_i - z_j||_2 and w_ij = exp(-d_ij / lambda). Both symmetric,
// zero / unit diagonal.
struct SimilarityGraph {
  Eigen::MatrixXd distances;
  Eigen::MatrixXd similarities;
  double lambda = 0.0;
  std::vector<std::string> area_ids;
};

// Euclidean distances between the rows of z.
Eigen::MatrixXd pairwise_distance(const Eigen::MatrixXd& z);
Eigen::MatrixXd pairwise_distance(const std::vector<FeatureVector>& z);

// Median of the strictly positive upper-triangle distances (mean of the two
// middle values for an even count). Throws DegenerateDataError if none.
double select_lambda(const Eigen::MatrixXd& d);

// exp(-d / lambda) elementwise. Note the distance enters to the first power.
Eigen::MatrixXd rbf_similarity(const Eigen::MatrixXd& d, double lambda);

// Distances, lambda (selected unless overridden) and similarities in one go.
SimilarityGraph build_similarity(const std::vector<FeatureVector>& z,
                                 std::optional<double> lambda_override = std::nullopt);

}  // namespace loadclust

#endif  // LOADCLUST_SIMILARITY_HPP_
