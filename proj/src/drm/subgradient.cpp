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


#include <algorithm>
#include <cmath>

#include "drm/internal.hpp"
#include "sgdrm/errors.hpp"

namespace sgdrm::drm {

namespace {

// Utility of a feasible candidate, or nullopt when infeasible / outside the domain.
std::optional<double> candidate_utility(const ProblemInstance& inst, const Eigen::MatrixXd& q) {
  const ConstraintReport c = check_constraints(inst, market::AllocationMatrix(q));
  if (c.max_relative_violation > 1e-9) return std::nullopt;
  try {
    return utility(detail::profits_of(inst, q), inst.fairness);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

}  // namespace

Solution solve_dual_subgradient(const ProblemInstance& inst, const DualState& init,
                                const SubgradientOptions& options) {
  inst.validate();
  init.validate(inst);
  if (options.max_iters < 1) throw InvalidArgument("solve_dual_subgradient: max_iters must be >= 1");
  if (!(options.step0 > 0.0)) throw InvalidArgument("solve_dual_subgradient: step0 must be > 0");
  precheck(inst);

  const auto sc = detail::scales(inst);
  const Eigen::MatrixXd upper = detail::box_upper(inst);
  const Eigen::VectorXd k = inst.weights();
  const Eigen::VectorXd d = inst.demand();
  const bool separable = inst.fairness == 0.0 || inst.max_min();
  InnerStep inner = options.inner;
  Diagnostics diag;
  diag.method = "dual-subgradient";
  if (inner == InnerStep::kClosedForm && !inst.closed_form_applicable()) {
    inner = InnerStep::kProjectedGradient;
    diag.notes.emplace_back("closed form not applicable; projected-gradient inner step");
  }

  DualState duals = init;
  Eigen::MatrixXd q = detail::proportional_allocation(inst);
  Eigen::MatrixXd average = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  double weight_sum = 0.0;
  std::optional<Eigen::MatrixXd> best;
  double best_utility = -std::numeric_limits<double>::infinity();
  double dual_bound = std::numeric_limits<double>::infinity();

  auto consider = [&](const Eigen::MatrixXd& candidate) {
    const Eigen::MatrixXd repaired = detail::repair_balance(inst, candidate);
    if (auto u = candidate_utility(inst, repaired); u && *u > best_utility) {
      best_utility = *u;
      best = repaired;
    }
  };

  bool handed_off = false;
  int it = 1;
  for (; it <= options.max_iters; ++it) {
    if (inner == InnerStep::kClosedForm && inst.fairness == 1.0) {
      if (!detail::proportional_fair_maximizer(inst, duals, upper, q)) {
        detail::projected_gradient_maximizer(inst, duals, upper, q);
      }
    } else if (inner == InnerStep::kClosedForm) {
      const Eigen::VectorXd omega =
          detail::utility_weights(Eigen::VectorXd::Ones(q.rows()), inst.fairness, duals.theta);
      q = detail::separable_maximizer(inst, duals, omega, upper);
    } else {
      detail::projected_gradient_maximizer(inst, duals, upper, q);
    }
    if (separable) dual_bound = std::min(dual_bound, detail::lagrangian_value(inst, q, duals));

    const double s = options.step0 / std::sqrt(static_cast<double>(it));
    average += s * q;
    weight_sum += s;
    const Eigen::MatrixXd ergodic = average / weight_sum;
    consider(q);
    consider(ergodic);

    const double violation = std::min(check_constraints(inst, market::AllocationMatrix(q)).max_relative_violation,
                                      check_constraints(inst, market::AllocationMatrix(ergodic)).max_relative_violation);

    // With polish on, a feasible warm start is all the interior point needs.
    if (options.polish && best && violation < options.primal_tol) {
      handed_off = true;
      break;
    }

    // Normalised subgradient steps: each constraint residual is relative to its bound.
    const DualState before = duals;
    for (Eigen::Index n = 0; n < q.rows(); ++n) {
      const double cap = inst.suppliers[static_cast<std::size_t>(n)].capacity;
      const double g = (q.row(n).dot(k) - cap) / cap;
      duals.delta[n] = std::max(0.0, duals.delta[n] + s * sc.utility_grad / sc.weight * g);
    }
    for (Eigen::Index l = 0; l < q.cols(); ++l) {
      duals.xi[l] += s * sc.utility_grad * (d[l] - q.col(l).sum()) / d[l];
    }
    if (inst.emissions_capped()) {
      const double g = (instance_emissions(inst, market::AllocationMatrix(q)) - inst.emissions_cap) /
                       inst.emissions_cap;
      duals.zeta = std::max(0.0, duals.zeta + s * sc.utility_grad / sc.emissions_grad * g);
    }
    if (inst.max_min()) {
      duals.theta = detail::project_simplex(duals.theta - s * detail::profits_of(inst, q) / sc.profit);
    }

    double change = ((duals.delta - before.delta) * sc.weight / sc.utility_grad).cwiseAbs().maxCoeff();
    change = std::max(change, ((duals.xi - before.xi) / sc.utility_grad).cwiseAbs().maxCoeff());
    change = std::max(change, std::abs(duals.zeta - before.zeta) * sc.emissions_grad / sc.utility_grad);
    change = std::max(change, (duals.theta - before.theta).cwiseAbs().maxCoeff());
    if (violation < options.primal_tol && change < options.dual_tol) {
      diag.converged = true;
      break;
    }
  }
  diag.iterations = std::min(it, options.max_iters);
  if (separable) diag.dual_bound = dual_bound;

  if (options.polish) {
    const std::optional<market::AllocationMatrix> warm =
        best ? std::optional<market::AllocationMatrix>(market::AllocationMatrix(*best)) : std::nullopt;
    Solution polished = solve_interior_point(inst, warm);
    polished.diagnostics.method = "dual-subgradient+interior-point";
    polished.diagnostics.iterations = diag.iterations;
    polished.diagnostics.converged = polished.diagnostics.converged && polished.diagnostics.kkt_residual < 1e-4;
    if (separable) {
      polished.diagnostics.dual_bound = std::min(polished.diagnostics.dual_bound, dual_bound);
    }
    for (auto& note : diag.notes) polished.diagnostics.notes.push_back(note);
    if (handed_off) {
      polished.diagnostics.notes.emplace_back("subgradient phase handed off at a feasible iterate");
    } else if (!diag.converged) polished.diagnostics.notes.emplace_back("subgradient phase hit max_iters");
    return polished;
  }

  if (!best) {
    diag.converged = false;
    diag.notes.emplace_back("no feasible iterate; returning the ergodic average");
    Solution sol = evaluate(inst, market::AllocationMatrix(detail::repair_balance(inst, average / weight_sum)),
                            duals, diag);
    sol.diagnostics.kkt_residual = kkt_residual(inst, sol);
    return sol;
  }
  Solution sol = evaluate(inst, market::AllocationMatrix(*best), duals, diag);
  sol.diagnostics.kkt_residual = kkt_residual(inst, sol);
  return sol;
}

}  // namespace sgdrm::drm
