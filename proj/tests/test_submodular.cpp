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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "loadclust/bench.hpp"
#include "loadclust/errors.hpp"
#include "loadclust/random.hpp"
#include "loadclust/submodular.hpp"

using namespace loadclust;

namespace {

Eigen::MatrixXd three_by_three() {
  Eigen::MatrixXd w(3, 3);
  w << 1.0, 0.5, 0.2,  //
      0.5, 1.0, 0.3,   //
      0.2, 0.3, 1.0;
  return w;
}

// Direct evaluation of sum_i max_{j in g} w_ij with no shared code.
double value_oracle(const Eigen::MatrixXd& w, const std::vector<Eigen::Index>& g) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    double best = 0.0;
    for (Eigen::Index j : g) best = std::max(best, w(i, j));
    total += best;
  }
  return total;
}

Eigen::VectorXd cache_for(const Eigen::MatrixXd& w, const std::vector<Eigen::Index>& g) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(w.rows());
  for (Eigen::Index j : g) c = c.cwiseMax(w.col(j));
  return c;
}

}  // namespace

TEST_CASE("facility location value examples") {
  Eigen::MatrixXd w = three_by_three();
  std::vector<Eigen::Index> none;
  CHECK(facility_location_value(w, none) == 0.0);
  std::vector<Eigen::Index> g0{0};
  CHECK(facility_location_value(w, g0) == doctest::Approx(1.7));
  std::vector<Eigen::Index> g02{0, 2};
  CHECK(facility_location_value(w, g02) == doctest::Approx(1.0 + 0.5 + 1.0));
  std::vector<Eigen::Index> all{0, 1, 2};
  CHECK(facility_location_value(w, all) == doctest::Approx(3.0));
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  std::vector<Eigen::Index> g13{1, 3};
  CHECK(facility_location_value(id, g13) == 2.0);
}

TEST_CASE("marginal gain equals the difference of values") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Eigen::MatrixXd w = bench::random_kernel_matrix(10, seed);
    Rng rng(seed);
    std::vector<Eigen::Index> g;
    for (Eigen::Index j = 0; j < 10; ++j)
      if (rng.uniform() < 0.3) g.push_back(j);
    Eigen::VectorXd cache = cache_for(w, g);
    for (Eigen::Index j = 0; j < 10; ++j) {
      if (std::find(g.begin(), g.end(), j) != g.end()) {
        CHECK_THROWS_AS(marginal_gain(w, g, j, cache), ArgumentError);
        continue;
      }
      std::vector<Eigen::Index> gj = g;
      gj.push_back(j);
      CHECK(marginal_gain(w, g, j, cache) ==
            doctest::Approx(value_oracle(w, gj) - value_oracle(w, g)).epsilon(1e-12));
    }
  }
}

TEST_CASE("diminishing returns on random kernels") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Eigen::MatrixXd w = bench::random_kernel_matrix(9, seed);
    Rng rng(seed + 1000);
    std::vector<Eigen::Index> a, b;  // a subset of b
    for (Eigen::Index j = 0; j < 8; ++j) {
      double u = rng.uniform();
      if (u < 0.25) {
        a.push_back(j);
        b.push_back(j);
      } else if (u < 0.5) {
        b.push_back(j);
      }
    }
    Eigen::Index x = 8;
    double ga = marginal_gain(w, a, x, cache_for(w, a));
    double gb = marginal_gain(w, b, x, cache_for(w, b));
    CHECK(ga >= gb - 1e-12);
    CHECK(gb >= 0.0);
    CHECK(value_oracle(w, a) <= value_oracle(w, b) + 1e-12);
  }
}

TEST_CASE("lazy and naive greedy agree") {
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    Eigen::Index n = 5 + static_cast<Eigen::Index>(seed % 26);
    Eigen::MatrixXd w = bench::random_kernel_matrix(n, seed, 1 + static_cast<int>(seed % 5));
    RankList lazy = lazy_greedy_select(w, n);
    RankList naive = naive_greedy_select(w, n);
    CHECK(lazy.order == naive.order);
    CHECK(lazy.gains == naive.gains);
    CHECK(lazy.objective_trace == naive.objective_trace);
    CHECK(lazy.evaluations <= naive.evaluations);
  }
}

TEST_CASE("rank list structure") {
  Eigen::MatrixXd w = bench::random_kernel_matrix(20, 4);
  RankList r = lazy_greedy_select(w, 20);
  REQUIRE(r.order.size() == 20);
  std::vector<Eigen::Index> sorted = r.order;
  std::sort(sorted.begin(), sorted.end());
  for (Eigen::Index i = 0; i < 20; ++i) CHECK(sorted[i] == i);
  CHECK(!r.stopped_early);
  // Gains are non-increasing and the trace is f of each prefix.
  for (std::size_t i = 1; i < r.gains.size(); ++i) CHECK(r.gains[i] <= r.gains[i - 1] + 1e-12);
  for (std::size_t i = 0; i < r.order.size(); ++i) {
    std::vector<Eigen::Index> prefix(r.order.begin(), r.order.begin() + i + 1);
    CHECK(r.objective_trace[i] == doctest::Approx(value_oracle(w, prefix)).epsilon(1e-12));
  }
  CHECK(r.objective_trace.back() == doctest::Approx(20.0));

  // A shorter budget returns the prefix of the longer run.
  for (Eigen::Index k = 1; k <= 20; ++k) {
    RankList p = lazy_greedy_select(w, k);
    CHECK(std::equal(p.order.begin(), p.order.end(), r.order.begin()));
  }
}

TEST_CASE("greedy meets the 1 - 1/e bound against exhaustive search") {
  const double bound = 1.0 - 1.0 / std::numbers::e;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    Eigen::Index n = 6 + static_cast<Eigen::Index>(seed % 7);
    Eigen::MatrixXd w = bench::random_kernel_matrix(n, seed);
    RankList r = lazy_greedy_select(w, std::min<Eigen::Index>(4, n));
    for (Eigen::Index k = 1; k <= 4; ++k) {
      auto best = bench::brute_force_best_subset(w, k);
      CHECK(r.objective_trace[k - 1] >= bound * best.value - 1e-12);
      CHECK(r.objective_trace[k - 1] <= best.value + 1e-12);
      CHECK(best.value == doctest::Approx(value_oracle(w, best.subset)).epsilon(1e-14));
    }
  }
}

TEST_CASE("evaluation counts") {
  Eigen::MatrixXd w = bench::random_kernel_matrix(25, 8);
  RankList naive = naive_greedy_select(w, 5);
  // N initial evaluations, then one per remaining candidate per later step.
  CHECK(naive.evaluations == 25 + 24 + 23 + 22 + 21);
  RankList lazy = lazy_greedy_select(w, 5);
  CHECK(lazy.evaluations >= 25);
  CHECK(lazy.evaluations < naive.evaluations);
}

TEST_CASE("ties go to the lowest index") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(4, 4);
  RankList r = lazy_greedy_select(w, 4);
  CHECK(r.order == std::vector<Eigen::Index>{0, 1, 2, 3});
  CHECK(r.gains == std::vector<double>{1.0, 1.0, 1.0, 1.0});
}

TEST_CASE("selection stops when no gain is left") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(3, 3);  // all areas identical
  RankList lazy = lazy_greedy_select(w, 3);
  RankList naive = naive_greedy_select(w, 3);
  CHECK(lazy.order == std::vector<Eigen::Index>{0});
  CHECK(lazy.stopped_early);
  CHECK(naive.order == lazy.order);
  CHECK(naive.stopped_early);
}

TEST_CASE("kernel validation") {
  CHECK_NOTHROW(validate_kernel(three_by_three()));
  Eigen::MatrixXd w = three_by_three();
  w(0, 0) = 0.9;
  CHECK_THROWS_AS(validate_kernel(w), ValidationError);
  w = three_by_three();
  w(0, 1) = 0.4;
  CHECK_THROWS_AS(validate_kernel(w), ValidationError);
  w = three_by_three();
  w(0, 1) = w(1, 0) = 1.2;
  CHECK_THROWS_AS(validate_kernel(w), ValidationError);
  w = three_by_three();
  w(0, 1) = w(1, 0) = -0.1;
  CHECK_THROWS_AS(validate_kernel(w), ValidationError);
  CHECK_THROWS_AS(validate_kernel(Eigen::MatrixXd::Ones(2, 3)), ValidationError);
  CHECK_THROWS_AS(lazy_greedy_select(three_by_three(), 0), ArgumentError);
  CHECK_THROWS_AS(lazy_greedy_select(three_by_three(), 4), ArgumentError);
}
