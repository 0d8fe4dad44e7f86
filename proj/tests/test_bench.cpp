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


#include <doctest.h>

#include <Eigen/SVD>

#include "loadclust/bench.hpp"
#include "loadclust/errors.hpp"
#include "loadclust/submodular.hpp"

using namespace loadclust;

TEST_CASE("synthetic settings validation") {
  CHECK_NOTHROW(bench::SyntheticSpec{}.validate());
  bench::SyntheticSpec s;
  s.t = 100;
  CHECK_THROWS(s.validate());
  s = {};
  s.spike_fraction = 1.0;
  CHECK_THROWS(s.validate());
  s = {};
  s.spike_amplitude = -0.1;
  CHECK_THROWS(s.validate());
  s = {};
  s.n_patterns = 0;
  CHECK_THROWS(s.validate());
}

TEST_CASE("generator shape, labels and determinism") {
  bench::SyntheticSpec s;
  s.t = 24 * 90;
  s.n_patterns = 3;
  s.areas_per_pattern = 4;
  auto a = bench::generate(s);
  CHECK(a.matrix.rows() == 24 * 90);
  CHECK(a.matrix.cols() == 12);
  CHECK(a.matrix.area_ids.front() == "A01");
  CHECK(a.matrix.area_ids.back() == "A12");
  CHECK(a.labels[4] == 1);
  CHECK(a.labels[5] == 2);
  CHECK(format_timestamp(a.matrix.timestamps.front()) == "2017-01-01T00:00:00");
  CHECK(!a.matrix.normalized);
  CHECK(a.matrix.values.allFinite());
  CHECK_NOTHROW(validate(a.matrix));

  auto b = bench::generate(s);
  CHECK(a.matrix.values == b.matrix.values);
  s.seed = 2;
  CHECK(bench::generate(s).matrix.values != a.matrix.values);
}

TEST_CASE("noise-free profiles of one pattern are scaled copies") {
  bench::SyntheticSpec s;
  s.t = 24 * 365;
  s.n_patterns = 2;
  s.areas_per_pattern = 3;
  s.noise_sigma = 0.0;
  s.spike_fraction = 0.0;
  auto d = bench::generate(s);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d.matrix.values);
  const auto& sv = svd.singularValues();
  CHECK(sv(2) / sv(0) < 1e-10);
}

TEST_CASE("low rank plus sparse generator") {
  auto p = bench::low_rank_plus_sparse(200, 30, 2, 0.05, 0.5, 7);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(p.low_rank);
  CHECK(svd.singularValues()(2) / svd.singularValues()(0) < 1e-12);
  Eigen::Index spikes = (p.sparse.array() != 0.0).count();
  // Each entry is a spike with probability 0.05: mean 300, sd about 17.
  CHECK(spikes > 240);
  CHECK(spikes < 360);
  CHECK((p.sparse.array().abs() == 0.5 || p.sparse.array() == 0.0).all());
  auto q = bench::low_rank_plus_sparse(200, 30, 2, 0.05, 0.5, 7);
  CHECK(p.sparse == q.sparse);
}

TEST_CASE("random kernel is a valid similarity") {
  Eigen::MatrixXd w = bench::random_kernel_matrix(12, 3);
  CHECK_NOTHROW(validate_kernel(w));
  CHECK(w == bench::random_kernel_matrix(12, 3));
}

TEST_CASE("brute force search") {
  Eigen::MatrixXd w = bench::random_kernel_matrix(8, 1);
  auto all = bench::brute_force_best_subset(w, 8);
  CHECK(all.value == doctest::Approx(8.0));
  // One center: the row with the largest sum.
  auto one = bench::brute_force_best_subset(w, 1);
  Eigen::Index best = 0;
  w.rowwise().sum().maxCoeff(&best);
  CHECK(one.subset == std::vector<Eigen::Index>{best});
  // Ties resolve to the lexicographically first subset.
  auto id = bench::brute_force_best_subset(Eigen::MatrixXd::Identity(5, 5), 2);
  CHECK(id.subset == std::vector<Eigen::Index>{0, 1});
  CHECK_THROWS_AS(bench::brute_force_best_subset(Eigen::MatrixXd::Identity(16, 16), 2), GuardError);
  CHECK_THROWS_AS(bench::brute_force_best_subset(w, 0), ArgumentError);
}

TEST_CASE("adjusted rand index") {
  std::vector<Eigen::Index> a{0, 0, 1, 1, 2, 2};
  std::vector<Eigen::Index> renamed{5, 5, 3, 3, 9, 9};
  CHECK(bench::adjusted_rand_index(a, renamed) == doctest::Approx(1.0));
  std::vector<Eigen::Index> b{0, 0, 1, 2, 2, 2};
  // Pair counts by hand: cells (0,0)=2 (1,1)=1 (1,2)=1 (2,2)=2 give 2,
  // rows 2,2,2 give 3, columns 2,1,3 give 4, and C(6,2) = 15.
  double expected = (2.0 - 3.0 * 4.0 / 15.0) / (0.5 * (3.0 + 4.0) - 3.0 * 4.0 / 15.0);
  CHECK(bench::adjusted_rand_index(a, b) == doctest::Approx(expected));
  CHECK(bench::adjusted_rand_index(a, b) == doctest::Approx(bench::adjusted_rand_index(b, a)));
  std::vector<Eigen::Index> shorter{0, 1};
  CHECK_THROWS_AS(bench::adjusted_rand_index(a, shorter), ArgumentError);
}
