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

#ifndef LOADCLUST_RPCA_HPP_
#define LOADCLUST_RPCA_HPP_

#include <optional>

#include <Eigen/Core>

#include "loadclust/errors.hpp"

namespace loadclust {

// Inexact augmented Lagrangian settings for principal component pursuit.
// rho0 defaults to 1.25 / ||M||_2 when unset.
struct SolverOptions {
  std::optional<double> rho0;
  double rho_growth = 1.5;
  double rho_cap_factor = 1e7;  // rho never exceeds rho0 * rho_cap_factor
  double tol = 1e-7;            // on ||M - L - S||_F / ||M||_F
  int max_iter = 1000;
};

struct RpcaDiagnostics {
  int iterations = 0;
  double residual = 0.0;
  Eigen::Index rank = 0;          // singular values of L above 1e-8 * sigma_max
  double sparse_fraction = 0.0;   // |S_ij| > 1e-8
};

struct Decomposition {
  Eigen::MatrixXd low_rank;
  Eigen::MatrixXd sparse;
  double mu = 0.0;
  RpcaDiagnostics diagnostics;

  // ||L||_* + mu * ||S||_1
  double objective() const;
};

// Thrown when the solver hits max_iter; keeps the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(double residual, Decomposition partial);
  double residual() const { return residual_; }
  const Decomposition& partial() const { return partial_; }

 private:
  double residual_;
  Decomposition partial_;
};

// 1 / sqrt(max(t, n)), the parameter-free weight of the sparse term.
double compute_mu(Eigen::Index t, Eigen::Index n);

// U * max(Sigma - tau, 0) * V^T.
Eigen::MatrixXd singular_value_threshold(const Eigen::MatrixXd& a, double tau);

// Elementwise sign(a) * max(|a| - tau, 0).
Eigen::MatrixXd shrink(const Eigen::MatrixXd& a, double tau);

double nuclear_norm(const Eigen::MatrixXd& a);
double spectral_norm(const Eigen::MatrixXd& a);

// Solves  min ||L||_* + mu ||S||_1  s.t.  L + S = M  by inexact ALM:
//   L <- SVT_{1/rho}(M - S + Y/rho)
//   S <- shrink_{mu/rho}(M - L + Y/rho)
//   Y <- Y + rho (M - L - S),  rho <- min(rho * growth, rho_max)
// Deterministic for fixed inputs. Throws ConvergenceError past max_iter.
Decomposition rpca_decompose(const Eigen::MatrixXd& m, double mu,
                             const SolverOptions& opts = {});

}  // namespace loadclust

#endif  // LOADCLUST_RPCA_HPP_
