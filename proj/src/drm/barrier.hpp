// Copyright 2026 The sgdrm Authors
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


#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace sgdrm::drm::detail {

/// Smooth constrained program
///
///   minimise F(x)  subject to  A x = b,  h_i(x) <= 0.
///
/// Callbacks fill the gradient / Hessian when the pointer is non-null.
/// The objective returns false outside its domain.
struct NlpProblem {
  using Objective = std::function<bool(const Eigen::VectorXd&, double&, Eigen::VectorXd*, Eigen::MatrixXd*)>;
  using Inequality = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*, Eigen::MatrixXd*)>;

  Objective objective;
  std::vector<Inequality> inequalities;
  Eigen::MatrixXd eq_matrix;  // p x dim, full row rank (p may be 0)
  Eigen::VectorXd eq_rhs;
};

struct BarrierOptions {
  double t0 = 1.0;
  double growth = 10.0;
  double gap_tol = 1e-11;    // stop once m / t falls below this
  int max_newton = 2000;
  bool crossover = true;     // finish with a Newton solve on the guessed active set
};

struct NlpResult {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;  // inequality multipliers, >= 0
  Eigen::VectorXd nu;      // equality multipliers: grad F + J^T lambda + A^T nu = 0
  int newton_steps = 0;
  bool converged = false;
  bool crossover = false;  // the active-set Newton step was accepted
};

/// Log-barrier method from a strictly feasible x0 (A x0 = b, h(x0) < 0).
NlpResult solve_barrier(const NlpProblem& problem, const Eigen::VectorXd& x0,
                        const BarrierOptions& options = {});

}  // namespace sgdrm::drm::detail
