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
#include <sstream>

#include "drm/internal.hpp"
#include "sgdrm/errors.hpp"

namespace sgdrm::drm {

namespace detail {

Slice lagrangian_slice(const ProblemInstance& inst, const DualState& duals, Eigen::Index n,
                       Eigen::Index l, double omega) {
  const auto& s = inst.suppliers[static_cast<std::size_t>(n)];
  const double k = inst.weights()[l];
  const double zeta = inst.emissions_capped() ? duals.zeta : 0.0;
  Slice out;
  out.a = -zeta * k * s.emis_quad;
  out.b = -omega * s.unit_cost - duals.delta[n] * k - zeta * k * s.emis_lin + duals.xi[l];
  if (s.price_sensitivity == 0) {
    out.b += omega * s.benchmark_price;
  } else {
    out.a += omega * s.benchmark_price / s.capacity;
  }
  return out;
}

double maximize_slice(const Slice& s, double upper) {
  if (s.a < 0.0) return std::clamp(-s.b / (2.0 * s.a), 0.0, upper);
  const double at_upper = s.a * upper * upper + s.b * upper;
  return at_upper > 0.0 ? upper : 0.0;
}

Eigen::MatrixXd separable_maximizer(const ProblemInstance& inst, const DualState& duals,
                                    const Eigen::VectorXd& omega, const Eigen::MatrixXd& upper) {
  Eigen::MatrixXd q(inst.n_suppliers(), inst.n_operators());
  for (Eigen::Index n = 0; n < q.rows(); ++n) {
    for (Eigen::Index l = 0; l < q.cols(); ++l) {
      q(n, l) = maximize_slice(lagrangian_slice(inst, duals, n, l, omega[n]), upper(n, l));
    }
  }
  return q;
}

bool proportional_fair_maximizer(const ProblemInstance& inst, const DualState& duals,
                                 const Eigen::MatrixXd& upper, Eigen::MatrixXd& q) {
  const double scale = inst.demand().maxCoeff();
  for (int it = 0; it < 2000; ++it) {
    const Eigen::VectorXd omega = utility_weights(profits_of(inst, q), 1.0, duals.theta);
    const Eigen::MatrixXd next = separable_maximizer(inst, duals, omega, upper);
    const double change = (next - q).cwiseAbs().maxCoeff();
    q = 0.5 * q + 0.5 * next;
    if (change < 1e-8 * scale) return true;
  }
  return false;
}

int projected_gradient_maximizer(const ProblemInstance& inst, const DualState& duals,
                                 const Eigen::MatrixXd& upper, Eigen::MatrixXd& q) {
  const double scale = inst.demand().maxCoeff();
  q = q.cwiseMax(0.0).cwiseMin(upper);
  double value = lagrangian_value(inst, q, duals);
  double step = -1.0;
  int it = 0;
  for (; it < 20000; ++it) {
    const Eigen::MatrixXd g = lagrangian_gradient(inst, market::AllocationMatrix(q), duals);
    const double gmax = g.cwiseAbs().maxCoeff();
    if (!(gmax > 0.0)) break;
    if (step < 0.0) step = 1e-3 * scale / gmax;
    Eigen::MatrixXd trial;
    double trial_value = value;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      trial = (q + step * g).cwiseMax(0.0).cwiseMin(upper);
      trial_value = lagrangian_value(inst, trial, duals);
      // Armijo condition on the projected step.
      if (trial_value >= value + 1e-4 * (g.array() * (trial - q).array()).sum()) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const double change = (trial - q).cwiseAbs().maxCoeff();
    q = trial;
    value = trial_value;
    step *= 2.0;
    if (change < 1e-8 * scale) break;
  }
  return it;
}

}  // namespace detail

market::AllocationMatrix solve_closed_form(const ProblemInstance& inst, const DualState& duals) {
  inst.validate();
  duals.validate(inst);
  if (!inst.closed_form_applicable()) {
    throw InvalidArgument("solve_closed_form: needs alpha in {0, 1, inf} and gamma in {0, 1}");
  }
  const double alpha = inst.fairness;

  auto stationary = [&](const Eigen::VectorXd& omega) {
    Eigen::MatrixXd q(inst.n_suppliers(), inst.n_operators());
    for (Eigen::Index n = 0; n < q.rows(); ++n) {
      for (Eigen::Index l = 0; l < q.cols(); ++l) {
        const auto s = detail::lagrangian_slice(inst, duals, n, l, omega[n]);
        const auto& sup = inst.suppliers[static_cast<std::size_t>(n)];
        std::ostringstream where;
        where << " at supplier " << n << ", operator " << l;
        if (sup.price_sensitivity == 0 && s.a == 0.0) {
          throw UnboundedStationarity(
              "solve_closed_form: Lagrangian is affine in q (zeta * psi = 0)" + where.str(),
              static_cast<std::size_t>(n), static_cast<std::size_t>(l));
        }
        if (std::abs(2.0 * s.a) < 1e-12) {
          throw SingularBranch("solve_closed_form: denominator within 1e-12 of zero" + where.str(),
                               static_cast<std::size_t>(n), static_cast<std::size_t>(l));
        }
        q(n, l) = std::max(0.0, -s.b / (2.0 * s.a));
      }
    }
    return q;
  };

  if (alpha != 1.0) {
    const Eigen::VectorXd omega =
        detail::utility_weights(Eigen::VectorXd::Ones(inst.n_suppliers()), alpha, duals.theta);
    return market::AllocationMatrix(stationary(omega));
  }

  // alpha = 1: weights 1 / profit_n depend on the allocation itself.
  Eigen::MatrixXd q = detail::proportional_allocation(inst);
  const double scale = inst.demand().maxCoeff();
  double last_change = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 5000; ++it) {
    const Eigen::VectorXd omega =
        detail::utility_weights(detail::profits_of(inst, q), 1.0, duals.theta);
    const Eigen::MatrixXd next = stationary(omega);
    const double change = (next - q).cwiseAbs().maxCoeff();
    q = 0.5 * q + 0.5 * next;
    if (change < 1e-8 * scale) return market::AllocationMatrix(q);
    if (!std::isfinite(change) || (it > 100 && change > 1e3 * last_change)) break;
    last_change = std::min(last_change, change);
  }
  throw NumericalError("solve_closed_form: alpha = 1 fixed-point iteration did not settle",
                       last_change);
}

Eigen::MatrixXd lagrangian_gradient(const ProblemInstance& inst, const market::AllocationMatrix& alloc,
                                    const DualState& duals) {
  const Eigen::MatrixXd& q = alloc.q;
  const Eigen::VectorXd k = inst.weights();
  const Eigen::VectorXd omega =
      detail::utility_weights(detail::profits_of(inst, q), inst.fairness, duals.theta);
  const double zeta = inst.emissions_capped() ? duals.zeta : 0.0;
  Eigen::MatrixXd g(q.rows(), q.cols());
  for (Eigen::Index n = 0; n < q.rows(); ++n) {
    const auto& s = inst.suppliers[static_cast<std::size_t>(n)];
    for (Eigen::Index l = 0; l < q.cols(); ++l) {
      const double x = std::max(0.0, q(n, l));
      g(n, l) = omega[n] * market::marginal_profit(s, x) - duals.delta[n] * k[l] + duals.xi[l] -
                zeta * k[l] * (2.0 * s.emis_quad * x + s.emis_lin);
    }
  }
  return g;
}

double dual_function(const ProblemInstance& inst, const DualState& duals) {
  const double alpha = inst.fairness;
  if (!(alpha == 0.0 || inst.max_min())) return std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : inst.suppliers) {
    if (s.price_sensitivity > 1) return std::numeric_limits<double>::quiet_NaN();
  }
  const Eigen::VectorXd omega =
      detail::utility_weights(Eigen::VectorXd::Ones(inst.n_suppliers()), alpha, duals.theta);
  const Eigen::MatrixXd upper = detail::box_upper(inst);
  const Eigen::MatrixXd q = detail::separable_maximizer(inst, duals, omega, upper);
  return detail::lagrangian_value(inst, q, duals);
}

}  // namespace sgdrm::drm
