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

#ifndef LOADCLUST_BENCH_HPP_
#define LOADCLUST_BENCH_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "loadclust/io.hpp"

namespace loadclust::bench {

// Planted-structure load data. Archetypes 0-3 are dual-peak, winter-peaking,
// summer-peaking and flat annual shapes; further patterns get seeded random
// mixtures of the same seasonal basis.
struct SyntheticSpec {
  int n_patterns = 4;
  int areas_per_pattern = 8;
  int t = 8760;                 // rows
  int step_hours = 1;
  double noise_sigma = 0.02;    // multiplicative Gaussian noise
  double spike_fraction = 0.002;
  double spike_amplitude = 0.1;  // relative to the area's clean peak-to-trough range
  std::uint64_t seed = 1;

  void validate() const;
};

struct SyntheticData {
  LoadMatrix matrix;                // raw, MW
  std::vector<Eigen::Index> labels;  // planted pattern per area
};

// Areas are interleaved: area j follows pattern j % n_patterns.
SyntheticData generate(const SyntheticSpec& spec);

std::string archetype_name(int pattern);

// L0 + S0 with L0 a sum of `rank` sinusoid outer products and S0 holding
// +-amplitude spikes at a seeded `fraction` of entries.
struct LowRankPlusSparse {
  Eigen::MatrixXd low_rank;
  Eigen::MatrixXd sparse;
};
LowRankPlusSparse low_rank_plus_sparse(Eigen::Index t, Eigen::Index n, int rank, double fraction,
                                       double amplitude, std::uint64_t seed);

// Kernel matrix exp(-d / median d) of n uniform random points in [0,1]^dim.
Eigen::MatrixXd random_kernel_matrix(Eigen::Index n, std::uint64_t seed, int dim = 4);

struct SubsetResult {
  std::vector<Eigen::Index> subset;
  double value = 0.0;
};

// Exhaustive maximum of the facility-location objective over k-subsets.
// First subset in lexicographic order wins ties. Throws GuardError when
// n > 15 or C(n, k) > 1e6.
SubsetResult brute_force_best_subset(const Eigen::MatrixXd& w, Eigen::Index k);

// Adjusted Rand index between two labelings of the same points.
double adjusted_rand_index(std::span<const Eigen::Index> a, std::span<const Eigen::Index> b);

}  // namespace loadclust::bench

#endif  // LOADCLUST_BENCH_HPP_
