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

#ifndef LOADCLUST_CLUSTERING_HPP_
#define LOADCLUST_CLUSTERING_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "loadclust/submodular.hpp"

namespace loadclust {

struct ClusterAssignment {
  Eigen::Index k = 0;
  std::vector<Eigen::Index> centers;  // rank-list prefix
  std::vector<Eigen::Index> labels;   // per area: index of its center
  std::optional<double> ch_score;     // absent when k == 1 or k == N
};

// Each area goes to the center with the highest similarity; ties go to the
// center listed first. Centers always label themselves.
std::vector<Eigen::Index> assign(const Eigen::MatrixXd& w, std::span<const Eigen::Index> centers);

// Variance-ratio criterion of a partition of the rows of z:
//   [B / (k - 1)] / [W / (N - k)]
// with B the between-cluster and W the within-cluster sum of squares.
// Labels may be arbitrary ids. Throws EvaluationError unless 2 <= k <= N-1.
double calinski_harabasz(const Eigen::MatrixXd& z, std::span<const Eigen::Index> labels);

struct KMeansResult {
  std::vector<Eigen::Index> labels;  // 0..k-1, numbered by first appearance
  double inertia = 0.0;              // within-cluster sum of squares
  Eigen::MatrixXd centroids;         // k x d, row c is cluster c
};

// Lloyd iterations from k-means++ seeding, best of `restarts` by inertia.
// Stops when no centroid moves more than 1e-9 or after 300 iterations.
// Restart r draws from Rng::derive(seed, r).
KMeansResult kmeans_baseline(const Eigen::MatrixXd& z, Eigen::Index k, std::uint64_t seed,
                             int restarts = 10);

struct KRange {
  Eigen::Index lo = 2;
  Eigen::Index hi = 8;
};

struct SweepEntry {
  Eigen::Index k = 0;
  double ch_score = 0.0;
  ClusterAssignment assignment;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  int selection_passes = 0;
  std::size_t evaluations = 0;  // marginal-gain evaluations spent on selection
  Eigen::Index recommended_k = 0;  // argmax CH, smallest K on ties
};

// Scores every K in the range from prefixes of one rank list.
SweepResult sweep_k(const Eigen::MatrixXd& w, const Eigen::MatrixXd& z, const RankList& ranks,
                    KRange range);

using Selector = std::function<RankList(const Eigen::MatrixXd&, Eigen::Index)>;

// Builds the rank list with `select` once (k = range.hi) and sweeps it.
SweepResult sweep_k(const Eigen::MatrixXd& w, const Eigen::MatrixXd& z, KRange range,
                    const Selector& select = lazy_greedy_select);

}  // namespace loadclust

#endif  // LOADCLUST_CLUSTERING_HPP_
