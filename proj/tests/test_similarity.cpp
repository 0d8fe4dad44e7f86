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

#include "loadclust/errors.hpp"
#include "loadclust/random.hpp"
#include "loadclust/similarity.hpp"

using namespace loadclust;

TEST_CASE("pairwise distance examples") {
  Eigen::MatrixXd z(3, 2);
  z << 0, 0, 3, 4, 0, 1;
  Eigen::MatrixXd d = pairwise_distance(z);
  CHECK(d(0, 1) == 5.0);
  CHECK(d(0, 2) == 1.0);
  CHECK(d(1, 2) == doctest::Approx(std::sqrt(18.0)));
  CHECK(d.diagonal().isZero(0.0));
  CHECK(d == d.transpose());
}

TEST_CASE("pairwise distance matches a direct loop") {
  Rng rng(3);
  Eigen::MatrixXd z(15, 16);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  Eigen::MatrixXd d = pairwise_distance(z);
  for (Eigen::Index i = 0; i < 15; ++i)
    for (Eigen::Index j = 0; j < 15; ++j) {
      double acc = 0.0;
      for (Eigen::Index c = 0; c < 16; ++c) acc += (z(i, c) - z(j, c)) * (z(i, c) - z(j, c));
      CHECK(d(i, j) == doctest::Approx(std::sqrt(acc)).epsilon(1e-13));
    }

  std::vector<FeatureVector> fv(15);
  for (Eigen::Index i = 0; i < 15; ++i)
    for (Eigen::Index c = 0; c < 16; ++c) fv[i].values[c] = z(i, c);
  CHECK(pairwise_distance(fv) == d);
}

TEST_CASE("lambda is the median positive distance") {
  Eigen::MatrixXd d(3, 3);
  d << 0, 1, 2, 1, 0, 3, 2, 3, 0;
  CHECK(select_lambda(d) == 2.0);

  Eigen::MatrixXd e(3, 3);
  e << 0, 2, 2, 2, 0, 0, 2, 0, 0;  // one coincident pair is skipped
  CHECK(select_lambda(e) == 2.0);

  Eigen::MatrixXd four(4, 4);
  four << 0, 1, 2, 3, 1, 0, 4, 5, 2, 4, 0, 6, 3, 5, 6, 0;
  CHECK(select_lambda(four) == 3.5);

  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd z(7 + trial, 3);
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.uniform();
    Eigen::MatrixXd dd = pairwise_distance(z);
    std::vector<double> v;
    for (Eigen::Index i = 0; i < dd.rows(); ++i)
      for (Eigen::Index j = i + 1; j < dd.cols(); ++j) v.push_back(dd(i, j));
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    double med = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    CHECK(select_lambda(dd) == doctest::Approx(med).epsilon(1e-15));
  }

  CHECK_THROWS_AS(select_lambda(Eigen::MatrixXd::Zero(3, 3)), DegenerateDataError);
}

TEST_CASE("similarity values") {
  Eigen::MatrixXd d(2, 2);
  d << 0, 1, 1, 0;
  Eigen::MatrixXd w = rbf_similarity(d, 1.0);
  CHECK(w(0, 1) == doctest::Approx(std::exp(-1.0)));
  CHECK(w(0, 0) == 1.0);
  d << 0, 3, 3, 0;
  CHECK(rbf_similarity(d, 1.0)(1, 0) == doctest::Approx(std::exp(-3.0)));
  // First power of the distance, not squared.
  CHECK(rbf_similarity(d, 3.0)(0, 1) == doctest::Approx(std::exp(-1.0)));
  CHECK_THROWS_AS(rbf_similarity(d, 0.0), ArgumentError);
  CHECK_THROWS_AS(rbf_similarity(d, -1.0), ArgumentError);
}

TEST_CASE("similarity decreases with distance and is scale covariant") {
  Rng rng(21);
  Eigen::MatrixXd z(12, 16);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.uniform();
  Eigen::MatrixXd d = pairwise_distance(z);
  Eigen::MatrixXd w = rbf_similarity(d, select_lambda(d));
  for (Eigen::Index a = 0; a < d.size(); ++a)
    for (Eigen::Index b = 0; b < d.size(); ++b)
      if (d(a) < d(b)) CHECK(w(a) >= w(b));
  CHECK(w == w.transpose());
  CHECK((w.array() > 0.0).all());
  CHECK((w.array() <= 1.0).all());

  // Scaling every feature by c scales distances and lambda alike, so the
  // kernel is unchanged.
  for (double c : {0.001, 2.5, 1000.0}) {
    Eigen::MatrixXd dc = pairwise_distance(z * c);
    Eigen::MatrixXd wc = rbf_similarity(dc, select_lambda(dc));
    CHECK((wc - w).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("build_similarity wires the pieces together") {
  std::vector<FeatureVector> fv(3);
  fv[0].area_id = "x";
  fv[1].area_id = "y";
  fv[2].area_id = "z";
  fv[1].values[0] = 1.0;
  fv[2].values[0] = 3.0;
  SimilarityGraph g = build_similarity(fv);
  CHECK(g.lambda == 2.0);
  CHECK(g.area_ids == std::vector<std::string>{"x", "y", "z"});
  CHECK(g.similarities(0, 2) == doctest::Approx(std::exp(-1.5)));
  SimilarityGraph o = build_similarity(fv, 1.0);
  CHECK(o.lambda == 1.0);
  CHECK(o.similarities(0, 1) == doctest::Approx(std::exp(-1.0)));
  CHECK_THROWS_AS(build_similarity(fv, 0.0), ArgumentError);
}
