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

#include "loadclust/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "loadclust/errors.hpp"
#include "loadclust/random.hpp"

namespace loadclust {
namespace {

constexpr int kMaxLloydIterations = 300;
constexpr double kCentroidShiftTol = 1e-9;

double squared_distance(const Eigen::MatrixXd& a, Eigen::Index i, const Eigen::MatrixXd& b,
                        Eigen::Index j) {
  double ss = 0.0;
  for (Eigen::Index f = 0; f < a.cols(); ++f) {
    const double e = a(i, f) - b(j, f);
    ss += e * e;
  }
  return ss;
}

// Maps arbitrary ids to 0..k-1 in order of first appearance.
std::vector<Eigen::Index> canonical_labels(std::span<const Eigen::Index> labels,
                                           Eigen::Index* k_out) {
  std::map<Eigen::Index, Eigen::Index> ids;
  std::vector<Eigen::Index> out;
  out.reserve(labels.size());
  for (auto l : labels) {
    auto [it, inserted] = ids.try_emplace(l, static_cast<Eigen::Index>(ids.size()));
    out.push_back(it->second);
  }
  *k_out = static_cast<Eigen::Index>(ids.size());
  return out;
}

Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& z, Eigen::Index k, Rng& rng) {
  const Eigen::Index n = z.rows();
  Eigen::MatrixXd centroids(k, z.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  Eigen::Index first = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)));
  centroids.row(0) = z.row(first);
  chosen[static_cast<std::size_t>(first)] = true;
  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2(i) = squared_distance(z, i, centroids, 0);
  for (Eigen::Index c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (d2(i) > 0.0 && target < acc) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {
        for (Eigen::Index i = n - 1; i >= 0; --i) {
          if (d2(i) > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // Every point coincides with a centroid already; take the first unused one.
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) {
          pick = i;
          break;
        }
      }
    }
    centroids.row(c) = z.row(pick);
    chosen[static_cast<std::size_t>(pick)] = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      d2(i) = std::min(d2(i), squared_distance(z, i, centroids, c));
    }
  }
  return centroids;
}

KMeansResult lloyd(const Eigen::MatrixXd& z, Eigen::MatrixXd centroids) {
  const Eigen::Index n = z.rows();
  const Eigen::Index k = centroids.rows();
  std::vector<Eigen::Index> labels(static_cast<std::size_t>(n), 0);
  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      double best_d = squared_distance(z, i, centroids, 0);
      for (Eigen::Index c = 1; c < k; ++c) {
        const double dc = squared_distance(z, i, centroids, c);
        if (dc < best_d) {
          best_d = dc;
          best = c;
        }
      }
      labels[static_cast<std::size_t>(i)] = best;
    }
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(k, z.cols());
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      next.row(labels[static_cast<std::size_t>(i)]) += z.row(i);
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        next.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty cluster: move it to the point farthest from its own centroid.
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double di = squared_distance(z, i, centroids, labels[static_cast<std::size_t>(i)]);
        if (di > far_d) {
          far_d = di;
          far = i;
        }
      }
      next.row(c) = z.row(far);
    }
    const double shift = (next - centroids).rowwise().norm().maxCoeff();
    centroids = std::move(next);
    if (shift < kCentroidShiftTol) break;
  }
  KMeansResult result;
  result.labels.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    double best_d = squared_distance(z, i, centroids, 0);
    for (Eigen::Index c = 1; c < k; ++c) {
      const double dc = squared_distance(z, i, centroids, c);
      if (dc < best_d) {
        best_d = dc;
        best = c;
      }
    }
    result.labels[static_cast<std::size_t>(i)] = best;
    result.inertia += best_d;
  }
  result.centroids = std::move(centroids);
  return result;
}

}  // namespace

std::vector<Eigen::Index> assign(const Eigen::MatrixXd& w, std::span<const Eigen::Index> centers) {
  if (centers.empty()) throw ArgumentError("assign: no centers");
  if (w.rows() != w.cols()) throw ArgumentError("assign: similarity matrix not square");
  std::vector<bool> is_center(static_cast<std::size_t>(w.rows()), false);
  for (auto c : centers) {
    if (c < 0 || c >= w.rows()) throw ArgumentError("assign: center index out of range");
    if (is_center[static_cast<std::size_t>(c)]) throw ArgumentError("assign: duplicate center");
    is_center[static_cast<std::size_t>(c)] = true;
  }
  std::vector<Eigen::Index> labels(static_cast<std::size_t>(w.rows()));
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    if (is_center[static_cast<std::size_t>(i)]) {
      labels[static_cast<std::size_t>(i)] = i;
      continue;
    }
    Eigen::Index best = centers.front();
    for (auto c : centers) {
      if (w(i, c) > w(i, best)) best = c;
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
  return labels;
}

double calinski_harabasz(const Eigen::MatrixXd& z, std::span<const Eigen::Index> labels) {
  const Eigen::Index n = z.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw ArgumentError("calinski_harabasz: label count does not match point count");
  }
  Eigen::Index k = 0;
  const auto canon = canonical_labels(labels, &k);
  if (k < 2 || k > n - 1) {
    throw EvaluationError("Calinski-Harabasz index undefined for " + std::to_string(k) +
                          " clusters of " + std::to_string(n) + " points");
  }
  Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(k, z.cols());
  std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    centroids.row(canon[static_cast<std::size_t>(i)]) += z.row(i);
    counts[static_cast<std::size_t>(canon[static_cast<std::size_t>(i)])] += 1.0;
  }
  for (Eigen::Index c = 0; c < k; ++c) centroids.row(c) /= counts[static_cast<std::size_t>(c)];
  const Eigen::RowVectorXd grand = z.colwise().mean();

  double between = 0.0;
  for (Eigen::Index c = 0; c < k; ++c) {
    between += counts[static_cast<std::size_t>(c)] * (centroids.row(c) - grand).squaredNorm();
  }
  double within = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    within += (z.row(i) - centroids.row(canon[static_cast<std::size_t>(i)])).squaredNorm();
  }
  if (within == 0.0) {
    return between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return (between / static_cast<double>(k - 1)) / (within / static_cast<double>(n - k));
}

KMeansResult kmeans_baseline(const Eigen::MatrixXd& z, Eigen::Index k, std::uint64_t seed,
                             int restarts) {
  if (k < 1 || k > z.rows()) {
    throw ArgumentError("kmeans: k must lie in [1, " + std::to_string(z.rows()) + "]");
  }
  if (restarts < 1) throw ArgumentError("kmeans: restarts must be >= 1");
  if (!z.allFinite()) throw ArgumentError("kmeans: non-finite features");
  KMeansResult best;
  bool have_best = false;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(r)));
    KMeansResult run = lloyd(z, kmeanspp_seed(z, k, rng));
    if (!have_best || run.inertia < best.inertia) {
      best = std::move(run);
      have_best = true;
    }
  }
  // Renumber clusters by first appearance so equal partitions compare equal.
  Eigen::Index used = 0;
  std::vector<Eigen::Index> canon = canonical_labels(best.labels, &used);
  Eigen::MatrixXd reordered = best.centroids;
  std::vector<bool> placed(static_cast<std::size_t>(k), false);
  for (std::size_t i = 0; i < canon.size(); ++i) {
    if (!placed[static_cast<std::size_t>(canon[i])]) {
      reordered.row(canon[i]) = best.centroids.row(best.labels[i]);
      placed[static_cast<std::size_t>(canon[i])] = true;
    }
  }
  best.labels = std::move(canon);
  best.centroids = reordered.topRows(used);
  return best;
}

SweepResult sweep_k(const Eigen::MatrixXd& w, const Eigen::MatrixXd& z, const RankList& ranks,
                    KRange range) {
  const Eigen::Index n = w.rows();
  if (z.rows() != n) throw ArgumentError("sweep_k: feature rows do not match similarity size");
  if (range.lo < 2 || range.hi > n - 1 || range.lo > range.hi) {
    throw ArgumentError("sweep_k: K range must lie within [2, " + std::to_string(n - 1) + "]");
  }
  if (range.hi > static_cast<Eigen::Index>(ranks.order.size())) {
    throw ArgumentError("sweep_k: K range exceeds rank list length " +
                        std::to_string(ranks.order.size()));
  }
  SweepResult out;
  out.selection_passes = 1;
  out.evaluations = ranks.evaluations;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = range.lo; k <= range.hi; ++k) {
    SweepEntry e;
    e.k = k;
    e.assignment.k = k;
    e.assignment.centers.assign(ranks.order.begin(), ranks.order.begin() + k);
    e.assignment.labels = assign(w, e.assignment.centers);
    e.ch_score = calinski_harabasz(z, e.assignment.labels);
    e.assignment.ch_score = e.ch_score;
    if (e.ch_score > best_score) {
      best_score = e.ch_score;
      out.recommended_k = k;
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

SweepResult sweep_k(const Eigen::MatrixXd& w, const Eigen::MatrixXd& z, KRange range,
                    const Selector& select) {
  if (range.lo < 2 || range.hi > w.rows() - 1 || range.lo > range.hi) {
    throw ArgumentError("sweep_k: K range must lie within [2, " + std::to_string(w.rows() - 1) +
                        "]");
  }
  const RankList ranks = select(w, range.hi);
  SweepResult out = sweep_k(w, z, ranks, range);
  out.selection_passes = 1;
  return out;
}

}  // namespace loadclust
