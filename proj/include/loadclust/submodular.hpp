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

#ifndef LOADCLUST_SUBMODULAR_HPP_
#define LOADCLUST_SUBMODULAR_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace loadclust {

// Cluster-center candidates in selection order. Any K-clustering uses the
// first K entries.
struct RankList {
  std::vector<Eigen::Index> order;
  std::vector<double> gains;            // marginal gain when each entry was picked
  std::vector<double> objective_trace;  // running sum of gains, f(prefix)
  std::size_t evaluations = 0;          // marginal-gain evaluations performed
  // Set when selection halted before k because no candidate had positive
  // gain (only possible when some w_ij == 1 for i != j).
  bool stopped_early = false;
};

// Throws ValidationError unless w is square, symmetric, has a unit diagonal
// and entries in [0, 1].
void validate_kernel(const Eigen::MatrixXd& w);

// f(G) = sum_i max_{j in G} w_ij, with f(empty) = 0.
double facility_location_value(const Eigen::MatrixXd& w, std::span<const Eigen::Index> gamma);

// f(G + j) - f(G) computed from cache[i] = max_{k in G} w_ik (zeros for an
// empty G) as sum_i max(0, w_ij - cache[i]).
double marginal_gain(const Eigen::MatrixXd& w, std::span<const Eigen::Index> gamma,
                     Eigen::Index j, const Eigen::VectorXd& cache);

// Greedy maximization of f under |G| <= k using stale gains as upper bounds
// (lazy evaluation). Ties go to the lowest index; the result is identical to
// naive_greedy_select.
RankList lazy_greedy_select(const Eigen::MatrixXd& w, Eigen::Index k);

// Re-evaluates every remaining candidate at every step. Reference for the
// lazy variant; same tie-breaking and stopping rule.
RankList naive_greedy_select(const Eigen::MatrixXd& w, Eigen::Index k);

}  // namespace loadclust

#endif  // LOADCLUST_SUBMODULAR_HPP_
