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

#include "loadclust/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "loadclust/errors.hpp"

namespace loadclust {

Eigen::MatrixXd pairwise_distance(const Eigen::MatrixXd& z) {
  if (z.rows() < 2) throw ArgumentError("pairwise_distance: need at least two vectors");
  if (!z.allFinite()) throw ArgumentError("pairwise_distance: non-finite feature");
  const Eigen::Index n = z.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double ss = 0.0;
      for (Eigen::Index f = 0; f < z.cols(); ++f) {
        const double e = z(i, f) - z(j, f);
        ss += e * e;
      }
      d(i, j) = d(j, i) = std::sqrt(ss);
    }
  }
  return d;
}

Eigen::MatrixXd pairwise_distance(const std::vector<FeatureVector>& z) {
  // FeatureVector holds a fixed-size array, so lengths can only disagree
  // when callers build vectors by other means; feature_matrix keeps that
  // invariant.
  return pairwise_distance(feature_matrix(z));
}

double select_lambda(const Eigen::MatrixXd& d) {
  if (d.rows() != d.cols()) throw ArgumentError("select_lambda: distance matrix not square");
  std::vector<double> positive;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < d.cols(); ++j) {
      if (d(i, j) > 0.0) positive.push_back(d(i, j));
    }
  }
  if (positive.empty()) {
    throw DegenerateDataError("all pairwise feature distances are zero; cannot scale kernel");
  }
  std::sort(positive.begin(), positive.end());
  const std::size_t n = positive.size();
  if (n % 2 == 1) return positive[n / 2];
  return 0.5 * (positive[n / 2 - 1] + positive[n / 2]);
}

Eigen::MatrixXd rbf_similarity(const Eigen::MatrixXd& d, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ArgumentError("rbf_similarity: lambda must be positive");
  }
  Eigen::MatrixXd w = d.unaryExpr([lambda](double x) { return std::exp(-x / lambda); });
  w.diagonal().setOnes();
  return w;
}

SimilarityGraph build_similarity(const std::vector<FeatureVector>& z,
                                 std::optional<double> lambda_override) {
  SimilarityGraph g;
  g.distances = pairwise_distance(z);
  g.lambda = lambda_override ? *lambda_override : select_lambda(g.distances);
  g.similarities = rbf_similarity(g.distances, g.lambda);
  for (const auto& f : z) g.area_ids.push_back(f.area_id);
  return g;
}

}  // namespace loadclust
