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

#include "loadclust/bench.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "loadclust/errors.hpp"
#include "loadclust/random.hpp"
#include "loadclust/similarity.hpp"
#include "loadclust/submodular.hpp"

namespace loadclust::bench {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kJitterPerNoise = 1.0;

struct Archetype {
  double base, summer, winter, daily;
};

constexpr std::array<Archetype, 4> kArchetypes{{
    {1.0, 1.0, 0.9, 0.1},    // dual-peak
    {1.0, 0.25, 1.0, 0.2},   // winter-peaking
    {1.0, 1.1, 0.1, 0.3},    // summer-peaking
    {1.0, 0.1, 0.1, 0.5},    // flat
}};

Archetype archetype(int pattern, std::uint64_t seed) {
  if (pattern < static_cast<int>(kArchetypes.size())) return kArchetypes[static_cast<std::size_t>(pattern)];
  Rng rng(Rng::derive(seed ^ 0xA5A5A5A5ULL, static_cast<std::uint64_t>(pattern)));
  return {1.0, rng.uniform(0.0, 1.2), rng.uniform(0.0, 1.2), rng.uniform(0.1, 0.4)};
}

double shape(const Archetype& a, Timestamp ts) {
  using namespace std::chrono;
  const auto day = floor<days>(ts);
  const year_month_day ymd{day};
  const sys_days jan1{ymd.year() / January / 1};
  const double hour_of_day = duration<double, std::ratio<3600>>(ts - day).count();
  const double day_of_year = static_cast<double>((day - jan1).count()) + hour_of_day / 24.0;
  // Seasonal phase peaks mid-July (day 196).
  const double c = std::cos(kTwoPi * (day_of_year - 196.0) / 365.25);
  const double summer = std::exp(4.0 * (c - 1.0));
  const double winter = std::exp(4.0 * (-c - 1.0));
  const double daily = 0.5 - 0.5 * std::cos(kTwoPi * (hour_of_day - 5.0) / 24.0);
  return a.base + a.summer * summer + a.winter * winter + a.daily * daily * (1.0 + 0.5 * summer);
}

std::string area_name(int j, int width) {
  std::string digits = std::to_string(j + 1);
  while (static_cast<int>(digits.size()) < width) digits.insert(digits.begin(), '0');
  return "A" + digits;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n_patterns < 1 || areas_per_pattern < 1 || t < 1 || step_hours < 1) {
    throw ArgumentError("synthetic data counts must be positive");
  }
  if (static_cast<long long>(t) * step_hours < 60LL * 24) {
    throw ArgumentError("synthetic series must span at least two months of hours");
  }
  if (!(noise_sigma >= 0.0)) throw ArgumentError("noise_sigma must be >= 0");
  if (!(spike_fraction >= 0.0 && spike_fraction < 1.0)) {
    throw ArgumentError("spike_fraction must lie in [0, 1)");
  }
  if (!(spike_amplitude >= 0.0)) throw ArgumentError("spike_amplitude must be >= 0");
}

std::string archetype_name(int pattern) {
  static const std::array<const char*, 4> names{"dual-peak", "winter-peaking", "summer-peaking",
                                                "flat"};
  if (pattern >= 0 && pattern < 4) return names[static_cast<std::size_t>(pattern)];
  return "mixture-" + std::to_string(pattern);
}

SyntheticData generate(const SyntheticSpec& spec) {
  spec.validate();
  const int n = spec.n_patterns * spec.areas_per_pattern;
  SyntheticData out;
  LoadMatrix& m = out.matrix;
  const Timestamp start = std::chrono::sys_days{std::chrono::year{2017} / 1 / 1};
  m.timestamps.reserve(static_cast<std::size_t>(spec.t));
  for (int r = 0; r < spec.t; ++r) {
    m.timestamps.push_back(start + std::chrono::hours{static_cast<long long>(r) * spec.step_hours});
  }
  const int width = std::max(2, static_cast<int>(std::to_string(n).size()));
  m.values.resize(spec.t, n);

  for (int j = 0; j < n; ++j) {
    const int p = j % spec.n_patterns;
    m.area_ids.push_back(area_name(j, width));
    out.labels.push_back(p);
    Rng rng(Rng::derive(spec.seed, static_cast<std::uint64_t>(j)));
    const double scale = rng.uniform(200.0, 20000.0);
    // Areas sharing a pattern differ by a small jitter of the seasonal
    // coefficients, proportional to the noise level.
    Archetype a = archetype(p, spec.seed);
    const double jitter = kJitterPerNoise * spec.noise_sigma;
    if (jitter > 0.0) {
      a.summer *= 1.0 + jitter * rng.normal();
      a.winter *= 1.0 + jitter * rng.normal();
      a.daily *= 1.0 + jitter * rng.normal();
    }
    Eigen::VectorXd s(spec.t);
    for (int r = 0; r < spec.t; ++r) s(r) = shape(a, m.timestamps[static_cast<std::size_t>(r)]);
    const double range = s.maxCoeff() - s.minCoeff();
    for (int r = 0; r < spec.t; ++r) {
      double x = scale * s(r);
      if (spec.noise_sigma > 0.0) x *= 1.0 + spec.noise_sigma * rng.normal();
      if (spec.spike_fraction > 0.0 && rng.uniform() < spec.spike_fraction) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        x += sign * spec.spike_amplitude * scale * range;
      }
      m.values(r, j) = x;
    }
  }
  return out;
}

LowRankPlusSparse low_rank_plus_sparse(Eigen::Index t, Eigen::Index n, int rank, double fraction,
                                       double amplitude, std::uint64_t seed) {
  if (t < 1 || n < 1 || rank < 1) throw ArgumentError("low_rank_plus_sparse: bad dimensions");
  Rng rng(seed);
  LowRankPlusSparse out;
  out.low_rank = Eigen::MatrixXd::Zero(t, n);
  for (int k = 0; k < rank; ++k) {
    Eigen::VectorXd u(t);
    for (Eigen::Index r = 0; r < t; ++r) {
      const double x = static_cast<double>(r);
      if (k == 0) {
        u(r) = 0.6 + 0.3 * std::sin(kTwoPi * x / static_cast<double>(t));
      } else if (k == 1) {
        u(r) = 0.3 * std::cos(kTwoPi * x / 24.0);
      } else {
        u(r) = 0.2 * std::sin(kTwoPi * x * (k + 1) / static_cast<double>(t) + k);
      }
    }
    Eigen::VectorXd v(n);
    for (Eigen::Index c = 0; c < n; ++c) v(c) = k == 0 ? rng.uniform(0.5, 1.0) : rng.uniform(-1.0, 1.0);
    out.low_rank += u * v.transpose();
  }
  out.sparse = Eigen::MatrixXd::Zero(t, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < t; ++r) {
      if (rng.uniform() < fraction) out.sparse(r, c) = rng.uniform() < 0.5 ? -amplitude : amplitude;
    }
  }
  return out;
}

Eigen::MatrixXd random_kernel_matrix(Eigen::Index n, std::uint64_t seed, int dim) {
  Rng rng(seed);
  Eigen::MatrixXd points(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int f = 0; f < dim; ++f) points(i, f) = rng.uniform();
  }
  const Eigen::MatrixXd d = pairwise_distance(points);
  return rbf_similarity(d, select_lambda(d));
}

SubsetResult brute_force_best_subset(const Eigen::MatrixXd& w, Eigen::Index k) {
  const Eigen::Index n = w.rows();
  if (w.cols() != n) throw ArgumentError("brute_force_best_subset: matrix not square");
  if (k < 1 || k > n) throw ArgumentError("brute_force_best_subset: k out of range");
  if (n > 15) throw GuardError("brute_force_best_subset: n > 15");
  double combos = 1.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    combos = combos * static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  if (combos > 1e6) throw GuardError("brute_force_best_subset: more than 1e6 subsets");

  std::vector<Eigen::Index> subset(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = i;
  SubsetResult best;
  bool have = false;
  while (true) {
    const double v = facility_location_value(w, subset);
    if (!have || v > best.value) {
      best = {subset, v};
      have = true;
    }
    // Advance to the next combination in lexicographic order.
    Eigen::Index pos = k - 1;
    while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++subset[static_cast<std::size_t>(pos)];
    for (Eigen::Index q = pos + 1; q < k; ++q) {
      subset[static_cast<std::size_t>(q)] = subset[static_cast<std::size_t>(q - 1)] + 1;
    }
  }
  return best;
}

double adjusted_rand_index(std::span<const Eigen::Index> a, std::span<const Eigen::Index> b) {
  if (a.size() != b.size()) throw ArgumentError("adjusted_rand_index: length mismatch");
  const auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
  std::map<std::pair<Eigen::Index, Eigen::Index>, double> table;
  std::map<Eigen::Index, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, count] : table) index += pairs(count);
  for (const auto& [key, count] : rows) sum_rows += pairs(count);
  for (const auto& [key, count] : cols) sum_cols += pairs(count);
  const double total = pairs(static_cast<double>(a.size()));
  const double expected = total > 0.0 ? sum_rows * sum_cols / total : 0.0;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) {
    // Both partitions trivial (all singletons or one block): agreement is perfect
    // exactly when the contingency table is a permutation.
    return table.size() == rows.size() && table.size() == cols.size() ? 1.0 : 0.0;
  }
  return (index - expected) / (max_index - expected);
}

}  // namespace loadclust::bench
