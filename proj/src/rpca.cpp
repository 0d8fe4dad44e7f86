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

#include "loadclust/rpca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

namespace loadclust {
namespace {

constexpr double kRankThreshold = 1e-8;
constexpr double kSparseThreshold = 1e-8;

void require_finite(const Eigen::MatrixXd& a, const char* what) {
  if (!a.allFinite()) throw ArgumentError(std::string(what) + ": non-finite entries");
}

Eigen::Index effective_rank(const Eigen::MatrixXd& l) {
  if (l.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(l);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  return (sv.array() > kRankThreshold * sv(0)).count();
}

RpcaDiagnostics diagnose(const Decomposition& d, int iterations, double residual) {
  RpcaDiagnostics diag;
  diag.iterations = iterations;
  diag.residual = residual;
  diag.rank = effective_rank(d.low_rank);
  diag.sparse_fraction =
      d.sparse.size() == 0
          ? 0.0
          : static_cast<double>((d.sparse.array().abs() > kSparseThreshold).count()) /
                static_cast<double>(d.sparse.size());
  return diag;
}

}  // namespace

double Decomposition::objective() const {
  return nuclear_norm(low_rank) + mu * sparse.lpNorm<1>();
}

ConvergenceError::ConvergenceError(double residual, Decomposition partial)
    : Error("R-PCA did not converge: residual " + std::to_string(residual) + " after " +
            std::to_string(partial.diagnostics.iterations) + " iterations"),
      residual_(residual),
      partial_(std::move(partial)) {}

double compute_mu(Eigen::Index t, Eigen::Index n) {
  if (t < 1 || n < 1) throw ArgumentError("compute_mu: dimensions must be positive");
  return 1.0 / std::sqrt(static_cast<double>(std::max(t, n)));
}

Eigen::MatrixXd singular_value_threshold(const Eigen::MatrixXd& a, double tau) {
  require_finite(a, "singular_value_threshold");
  if (!(tau >= 0.0)) throw ArgumentError("singular_value_threshold: tau must be >= 0");
  if (a.size() == 0) return a;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = (svd.singularValues().array() - tau).max(0.0).matrix();
  Eigen::Index keep = 0;
  while (keep < sv.size() && sv(keep) > 0.0) ++keep;
  if (keep == 0) return Eigen::MatrixXd::Zero(a.rows(), a.cols());
  return svd.matrixU().leftCols(keep) * sv.head(keep).asDiagonal() *
         svd.matrixV().leftCols(keep).transpose();
}

Eigen::MatrixXd shrink(const Eigen::MatrixXd& a, double tau) {
  require_finite(a, "shrink");
  if (!(tau >= 0.0)) throw ArgumentError("shrink: tau must be >= 0");
  return a.unaryExpr([tau](double x) {
    if (x > tau) return x - tau;
    if (x < -tau) return x + tau;
    return 0.0;
  });
}

double nuclear_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues().sum();
}

double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

Decomposition rpca_decompose(const Eigen::MatrixXd& m, double mu, const SolverOptions& opts) {
  require_finite(m, "rpca_decompose");
  if (m.size() == 0) throw ArgumentError("rpca_decompose: empty matrix");
  if (!(mu > 0.0)) throw ArgumentError("rpca_decompose: mu must be positive");
  if (opts.max_iter < 1) throw ArgumentError("rpca_decompose: max_iter must be >= 1");
  if (!(opts.tol > 0.0)) throw ArgumentError("rpca_decompose: tol must be positive");
  if (!(opts.rho_growth >= 1.0)) throw ArgumentError("rpca_decompose: rho growth must be >= 1");

  Decomposition d;
  d.mu = mu;
  d.low_rank = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  d.sparse = Eigen::MatrixXd::Zero(m.rows(), m.cols());

  const double m_fro = m.norm();
  if (m_fro == 0.0) {
    d.diagnostics = diagnose(d, 1, 0.0);
    return d;
  }

  const double m_two = spectral_norm(m);
  const double m_inf = m.cwiseAbs().maxCoeff();
  if (opts.rho0 && !(*opts.rho0 > 0.0)) throw ArgumentError("rpca_decompose: rho0 must be positive");
  double rho = opts.rho0.value_or(1.25 / m_two);
  const double rho_max = rho * opts.rho_cap_factor;

  Eigen::MatrixXd y = m / std::max(m_two, m_inf / mu);
  Eigen::MatrixXd residual_matrix(m.rows(), m.cols());
  double residual = 0.0;

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    d.low_rank = singular_value_threshold(m - d.sparse + y / rho, 1.0 / rho);
    d.sparse = shrink(m - d.low_rank + y / rho, mu / rho);
    residual_matrix = m - d.low_rank - d.sparse;
    y += rho * residual_matrix;
    rho = std::min(rho * opts.rho_growth, rho_max);
    residual = residual_matrix.norm() / m_fro;
    if (residual <= opts.tol) {
      d.diagnostics = diagnose(d, iter, residual);
      return d;
    }
  }
  d.diagnostics = diagnose(d, opts.max_iter, residual);
  throw ConvergenceError(residual, std::move(d));
}

}  // namespace loadclust
