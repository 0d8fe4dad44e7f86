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

#include "loadclust/submodular.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "loadclust/errors.hpp"

namespace loadclust {
namespace {

constexpr double kSymmetryTol = 1e-12;

// Shared by both selectors so that lazy and naive see bit-identical gains.
double gain_against(const Eigen::MatrixXd& w, Eigen::Index j, const Eigen::VectorXd& cache) {
  double gain = 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    const double improvement = w(i, j) - cache(i);
    if (improvement > 0.0) gain += improvement;
  }
  return gain;
}

void absorb(const Eigen::MatrixXd& w, Eigen::Index j, Eigen::VectorXd& cache) {
  cache = cache.cwiseMax(w.col(j));
}

void check_k(const Eigen::MatrixXd& w, Eigen::Index k) {
  if (k < 1 || k > w.rows()) {
    throw ArgumentError("k must lie in [1, " + std::to_string(w.rows()) + "], got " +
                        std::to_string(k));
  }
}

void record(RankList& out, Eigen::Index j, double gain) {
  out.order.push_back(j);
  out.gains.push_back(gain);
  out.objective_trace.push_back((out.objective_trace.empty() ? 0.0 : out.objective_trace.back()) +
                                gain);
}

}  // namespace

void validate_kernel(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols() || w.rows() == 0) {
    throw ValidationError("similarity matrix must be square and nonempty");
  }
  if (!w.allFinite()) throw ValidationError("similarity matrix has non-finite entries");
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    if (w(i, i) != 1.0) throw ValidationError("similarity diagonal must be 1");
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (w(i, j) < 0.0 || w(i, j) > 1.0) {
        throw ValidationError("similarity entries must lie in [0, 1]");
      }
      if (std::abs(w(i, j) - w(j, i)) > kSymmetryTol) {
        throw ValidationError("similarity matrix is not symmetric");
      }
    }
  }
}

double facility_location_value(const Eigen::MatrixXd& w, std::span<const Eigen::Index> gamma) {
  for (auto j : gamma) {
    if (j < 0 || j >= w.cols()) throw ArgumentError("facility_location_value: index out of range");
  }
  if (gamma.empty()) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    double best = w(i, gamma.front());
    for (auto j : gamma) best = std::max(best, w(i, j));
    total += best;
  }
  return total;
}

double marginal_gain(const Eigen::MatrixXd& w, std::span<const Eigen::Index> gamma,
                     Eigen::Index j, const Eigen::VectorXd& cache) {
  if (j < 0 || j >= w.cols()) throw ArgumentError("marginal_gain: index out of range");
  if (cache.size() != w.rows()) throw ArgumentError("marginal_gain: cache size mismatch");
  if (std::find(gamma.begin(), gamma.end(), j) != gamma.end()) {
    throw ArgumentError("marginal_gain: candidate " + std::to_string(j) + " already selected");
  }
  return gain_against(w, j, cache);
}

RankList lazy_greedy_select(const Eigen::MatrixXd& w, Eigen::Index k) {
  validate_kernel(w);
  check_k(w, k);
  const Eigen::Index n = w.rows();

  struct Bound {
    double gain;
    Eigen::Index index;
    Eigen::Index step;  // selection step at which gain was last evaluated
  };
  // Largest bound on top; lower index first among equal bounds.
  const auto lower_priority = [](const Bound& a, const Bound& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.index > b.index;
  };
  std::priority_queue<Bound, std::vector<Bound>, decltype(lower_priority)> queue(lower_priority);

  RankList out;
  Eigen::VectorXd cache = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    queue.push({gain_against(w, j, cache), j, 0});
    ++out.evaluations;
  }

  Eigen::Index step = 0;
  while (step < k && !queue.empty()) {
    Bound top = queue.top();
    queue.pop();
    if (top.step == step) {
      // Fresh gain that beats every remaining bound: since stale bounds only
      // overestimate, no other candidate can do better.
      if (top.gain <= 0.0) {
        out.stopped_early = true;
        break;
      }
      record(out, top.index, top.gain);
      absorb(w, top.index, cache);
      ++step;
      continue;
    }
    top.gain = gain_against(w, top.index, cache);
    top.step = step;
    ++out.evaluations;
    queue.push(top);
  }
  return out;
}

RankList naive_greedy_select(const Eigen::MatrixXd& w, Eigen::Index k) {
  validate_kernel(w);
  check_k(w, k);
  const Eigen::Index n = w.rows();
  RankList out;
  Eigen::VectorXd cache = Eigen::VectorXd::Zero(n);
  std::vector<bool> selected(static_cast<std::size_t>(n), false);
  for (Eigen::Index step = 0; step < k; ++step) {
    Eigen::Index best = -1;
    double best_gain = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (selected[static_cast<std::size_t>(j)]) continue;
      const double g = gain_against(w, j, cache);
      ++out.evaluations;
      if (best < 0 || g > best_gain) {
        best = j;
        best_gain = g;
      }
    }
    if (best < 0 || best_gain <= 0.0) {
      out.stopped_early = true;
      break;
    }
    selected[static_cast<std::size_t>(best)] = true;
    record(out, best, best_gain);
    absorb(w, best, cache);
  }
  return out;
}

}  // namespace loadclust
