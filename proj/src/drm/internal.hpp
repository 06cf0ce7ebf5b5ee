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

#include "sgdrm/drm.hpp"

namespace sgdrm::drm::detail {

/// Entry-wise upper bounds implied by capacity and balance: min(demand_l, capacity_n / k_l).
Eigen::MatrixXd box_upper(const ProblemInstance& inst);

/// Balance-satisfying allocation proportional to capacity; strictly inside
/// the capacity constraints whenever aggregate capacity exceeds demand.
Eigen::MatrixXd proportional_allocation(const ProblemInstance& inst);

/// Characteristic magnitudes used to normalise steps and tolerances.
struct Scales {
  double energy = 1.0;        // largest demand
  double profit = 1.0;        // energy * largest benchmark price
  double utility_grad = 1.0;  // typical |dU/dq| at the proportional allocation
  double emissions_grad = 1.0;
  double weight = 1.0;        // largest k_l
};
Scales scales(const ProblemInstance& inst);

/// dU/dProfit_n with profits floored at kProfitFloor (alpha = inf returns theta).
Eigen::VectorXd utility_weights(const Eigen::VectorXd& profits, double alpha,
                                const Eigen::VectorXd& theta);

/// Utility with profits floored at kProfitFloor; alpha = inf returns theta . profits.
double floored_utility(const Eigen::VectorXd& profits, double alpha, const Eigen::VectorXd& theta);

/// L(Q, duals) with the floored utility; the emissions term is dropped when uncapped.
double lagrangian_value(const ProblemInstance& inst, const Eigen::MatrixXd& q,
                        const DualState& duals);

Eigen::VectorXd profits_of(const ProblemInstance& inst, const Eigen::MatrixXd& q);

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

/// Coefficients of the per-entry Lagrangian slice f(q) = a q^2 + b q when the
/// supplier's profit is weighted by `omega` (gamma in {0, 1}).
struct Slice {
  double a = 0.0;
  double b = 0.0;
};
Slice lagrangian_slice(const ProblemInstance& inst, const DualState& duals, Eigen::Index n,
                       Eigen::Index l, double omega);

/// argmax of a q^2 + b q over [0, upper]; ties resolve to the smaller q.
double maximize_slice(const Slice& s, double upper);

/// Exact box-constrained maximiser for fixed profit weights (separable case).
Eigen::MatrixXd separable_maximizer(const ProblemInstance& inst, const DualState& duals,
                                    const Eigen::VectorXd& omega, const Eigen::MatrixXd& upper);

/// Box-constrained maximiser of L for alpha = 1 by damped fixed point on
/// the profit vector. Returns false when the iteration does not settle.
bool proportional_fair_maximizer(const ProblemInstance& inst, const DualState& duals,
                                 const Eigen::MatrixXd& upper, Eigen::MatrixXd& q);

/// Projected gradient ascent of L over the box, warm-started at `q`.
int projected_gradient_maximizer(const ProblemInstance& inst, const DualState& duals,
                                 const Eigen::MatrixXd& upper, Eigen::MatrixXd& q);

/// Rescales each column to its demand; empty columns are filled pro rata to capacity.
Eigen::MatrixXd repair_balance(const ProblemInstance& inst, const Eigen::MatrixXd& q);

}  // namespace sgdrm::drm::detail
