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

namespace sgdrm::drm {

double KktReport::total() const {
  return std::max({stationarity, complementarity, primal, dual_sign});
}

KktReport kkt_report(const ProblemInstance& inst, const Solution& sol) {
  const auto& q = sol.allocation.q;
  const auto& duals = sol.duals;
  KktReport r;

  const Eigen::MatrixXd g = lagrangian_gradient(inst, sol.allocation, duals);
  const double support = kSupportThreshold * inst.demand().maxCoeff();
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double gi = g.data()[i];
    // Off the support only an ascent direction into q > 0 violates stationarity.
    r.stationarity = std::max(r.stationarity, q.data()[i] > support ? std::abs(gi) : std::max(0.0, gi));
  }

  const ConstraintReport c = check_constraints(inst, sol.allocation);
  r.primal = c.max_relative_violation;

  const Eigen::VectorXd profits = detail::profits_of(inst, q);
  double u = 0.0;
  try {
    u = utility(profits, inst.fairness);
  } catch (const std::exception&) {
    u = 0.0;
  }
  const double scale = std::max(1.0, std::abs(u));
  double comp = (duals.delta.array() * c.capacity_slack.array()).abs().maxCoeff();
  if (inst.emissions_capped()) comp = std::max(comp, std::abs(duals.zeta * c.emissions_slack));
  if (inst.max_min()) {
    const double floor = profits.minCoeff();
    comp = std::max(comp, (duals.theta.array() * (profits.array() - floor)).abs().maxCoeff());
  }
  r.complementarity = comp / scale;

  double sign = std::max(0.0, -duals.delta.minCoeff());
  sign = std::max(sign, -duals.zeta);
  if (inst.max_min()) {
    sign = std::max(sign, -duals.theta.minCoeff());
    sign = std::max(sign, std::abs(duals.theta.sum() - 1.0));
  }
  r.dual_sign = sign;
  return r;
}

}  // namespace sgdrm::drm
