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
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_01.hpp>
#include <cmath>
#include <sstream>

#include "drm/internal.hpp"
#include "sgdrm/errors.hpp"

namespace sgdrm::drm {

Eigen::VectorXd ProblemInstance::demand() const {
  Eigen::VectorXd d(n_operators());
  for (Eigen::Index l = 0; l < d.size(); ++l) d[l] = operators[static_cast<std::size_t>(l)].total_energy;
  return d;
}

Eigen::VectorXd ProblemInstance::weights() const {
  Eigen::VectorXd k = Eigen::VectorXd::Ones(n_operators());
  if (convention == EnergyConvention::kPerBsVerbatim) {
    for (Eigen::Index l = 0; l < k.size(); ++l) k[l] = operators[static_cast<std::size_t>(l)].n_bs;
  }
  return k;
}

bool ProblemInstance::closed_form_applicable() const {
  if (!(fairness == 0.0 || fairness == 1.0 || max_min())) return false;
  return std::all_of(suppliers.begin(), suppliers.end(),
                     [](const auto& s) { return s.price_sensitivity <= 1; });
}

void ProblemInstance::validate() const {
  if (suppliers.empty()) throw InvalidArgument("problem: at least one supplier is required");
  if (operators.empty()) throw InvalidArgument("problem: at least one operator is required");
  for (const auto& s : suppliers) s.validate();
  for (const auto& o : operators) {
    if (!std::isfinite(o.total_energy) || o.total_energy <= 0.0) {
      throw InvalidArgument("problem: operator '" + o.operator_id + "' must demand > 0 J");
    }
    if (convention == EnergyConvention::kPerBsVerbatim && !(o.n_bs > 0.0)) {
      throw InvalidArgument("problem: operator '" + o.operator_id + "' needs n_bs > 0");
    }
  }
  if (std::isnan(emissions_cap) || emissions_cap <= 0.0) {
    throw InvalidArgument("problem: emissions_cap must be > 0");
  }
  if (std::isnan(fairness) || fairness < 0.0) throw InvalidArgument("problem: fairness must be >= 0");
}

DualState DualState::zeros(const ProblemInstance& inst) {
  DualState d;
  d.delta = Eigen::VectorXd::Zero(inst.n_suppliers());
  d.xi = Eigen::VectorXd::Zero(inst.n_operators());
  d.theta = Eigen::VectorXd::Constant(inst.n_suppliers(), 1.0 / static_cast<double>(inst.n_suppliers()));
  return d;
}

DualState DualState::random(const ProblemInstance& inst, std::uint64_t seed) {
  const auto sc = detail::scales(inst);
  boost::random::mt19937_64 rng(seed);
  boost::random::uniform_01<double> unit;
  DualState d = zeros(inst);
  for (Eigen::Index n = 0; n < d.delta.size(); ++n) d.delta[n] = unit(rng) * sc.utility_grad / sc.weight;
  for (Eigen::Index l = 0; l < d.xi.size(); ++l) d.xi[l] = (2.0 * unit(rng) - 1.0) * sc.utility_grad;
  if (inst.emissions_capped()) d.zeta = unit(rng) * sc.utility_grad / sc.emissions_grad;
  // Normalised exponentials are uniform on the simplex.
  for (Eigen::Index n = 0; n < d.theta.size(); ++n) d.theta[n] = -std::log1p(-unit(rng));
  d.theta /= d.theta.sum();
  return d;
}

void DualState::validate(const ProblemInstance& inst) const {
  if (delta.size() != inst.n_suppliers() || xi.size() != inst.n_operators() ||
      theta.size() != inst.n_suppliers()) {
    throw InvalidArgument("DualState dimensions do not match the problem");
  }
  if ((delta.array() < 0.0).any() || zeta < 0.0 || (theta.array() < 0.0).any()) {
    throw InvalidArgument("DualState: delta, zeta and theta must be nonnegative");
  }
  if (!delta.allFinite() || !xi.allFinite() || !std::isfinite(zeta) || !theta.allFinite()) {
    throw InvalidArgument("DualState: multipliers must be finite");
  }
  if (inst.max_min() && std::abs(theta.sum() - 1.0) > 1e-9) {
    throw InvalidArgument("DualState: theta must sum to 1 for max-min fairness");
  }
}

double instance_emissions(const ProblemInstance& inst, const market::AllocationMatrix& alloc) {
  const Eigen::VectorXd k = inst.weights();
  double total = 0.0;
  for (Eigen::Index n = 0; n < alloc.q.rows(); ++n) {
    const auto& s = inst.suppliers[static_cast<std::size_t>(n)];
    for (Eigen::Index l = 0; l < alloc.q.cols(); ++l) {
      const double q = alloc.q(n, l);
      total += k[l] * (s.emis_quad * q * q + s.emis_lin * q);
    }
  }
  return total;
}

ConstraintReport check_constraints(const ProblemInstance& inst, const market::AllocationMatrix& alloc) {
  if (alloc.q.rows() != inst.n_suppliers() || alloc.q.cols() != inst.n_operators()) {
    throw InvalidArgument("check_constraints: allocation dimensions do not match the problem");
  }
  const Eigen::VectorXd k = inst.weights();
  const Eigen::VectorXd d = inst.demand();
  ConstraintReport r;
  r.capacity_slack.resize(inst.n_suppliers());
  double worst = 0.0;
  for (Eigen::Index n = 0; n < inst.n_suppliers(); ++n) {
    const double cap = inst.suppliers[static_cast<std::size_t>(n)].capacity;
    r.capacity_slack[n] = cap - alloc.q.row(n).dot(k);
    worst = std::max(worst, -r.capacity_slack[n] / cap);
  }
  r.balance_residual = alloc.q.colwise().sum().transpose() - d;
  worst = std::max(worst, (r.balance_residual.array().abs() / d.array()).maxCoeff());
  r.emissions = instance_emissions(inst, alloc);
  r.emissions_slack = inst.emissions_cap - r.emissions;
  if (inst.emissions_capped()) worst = std::max(worst, -r.emissions_slack / inst.emissions_cap);
  r.min_entry = alloc.q.size() ? alloc.q.minCoeff() : 0.0;
  worst = std::max(worst, -r.min_entry / d.maxCoeff());
  r.max_relative_violation = worst;
  return r;
}

Solution evaluate(const ProblemInstance& inst, const market::AllocationMatrix& alloc,
                  DualState duals, Diagnostics diagnostics) {
  Solution sol;
  sol.allocation = alloc;
  sol.profits = detail::profits_of(inst, alloc.q);
  try {
    sol.utility = utility(sol.profits, inst.fairness);
  } catch (const DomainError&) {
    sol.utility = -std::numeric_limits<double>::infinity();
    diagnostics.notes.emplace_back("nonpositive profit: utility undefined");
  }
  sol.duals = std::move(duals);
  diagnostics.production = alloc.q.rowwise().sum();
  Eigen::VectorXd n_bs(inst.n_operators());
  for (Eigen::Index l = 0; l < n_bs.size(); ++l) n_bs[l] = inst.operators[static_cast<std::size_t>(l)].n_bs;
  diagnostics.weighted_production = alloc.q * n_bs;
  diagnostics.max_violation = check_constraints(inst, alloc).max_relative_violation;
  sol.diagnostics = std::move(diagnostics);
  return sol;
}

namespace detail {

Eigen::MatrixXd box_upper(const ProblemInstance& inst) {
  const Eigen::VectorXd k = inst.weights();
  const Eigen::VectorXd d = inst.demand();
  Eigen::MatrixXd u(inst.n_suppliers(), inst.n_operators());
  for (Eigen::Index n = 0; n < u.rows(); ++n) {
    for (Eigen::Index l = 0; l < u.cols(); ++l) {
      u(n, l) = std::min(d[l], inst.suppliers[static_cast<std::size_t>(n)].capacity / k[l]);
    }
  }
  return u;
}

Eigen::MatrixXd proportional_allocation(const ProblemInstance& inst) {
  Eigen::VectorXd cap(inst.n_suppliers());
  for (Eigen::Index n = 0; n < cap.size(); ++n) cap[n] = inst.suppliers[static_cast<std::size_t>(n)].capacity;
  return (cap / cap.sum()) * inst.demand().transpose();
}

Eigen::VectorXd profits_of(const ProblemInstance& inst, const Eigen::MatrixXd& q) {
  Eigen::VectorXd p(q.rows());
  for (Eigen::Index n = 0; n < q.rows(); ++n) {
    const auto& s = inst.suppliers[static_cast<std::size_t>(n)];
    double total = 0.0;
    for (Eigen::Index l = 0; l < q.cols(); ++l) {
      const double x = std::max(0.0, q(n, l));
      total += x * (market::unit_price(s, x) - s.unit_cost);
    }
    p[n] = total;
  }
  return p;
}

Eigen::VectorXd utility_weights(const Eigen::VectorXd& profits, double alpha,
                                const Eigen::VectorXd& theta) {
  if (alpha == kMaxMinFairness) return theta;
  if (alpha == 0.0) return Eigen::VectorXd::Ones(profits.size());
  return profits.array().max(kProfitFloor).pow(-alpha);
}

double floored_utility(const Eigen::VectorXd& profits, double alpha, const Eigen::VectorXd& theta) {
  if (alpha == kMaxMinFairness) return theta.dot(profits);
  if (alpha == 0.0) return profits.sum();
  return utility(profits.array().max(kProfitFloor).matrix(), alpha);
}

double lagrangian_value(const ProblemInstance& inst, const Eigen::MatrixXd& q,
                        const DualState& duals) {
  const Eigen::VectorXd k = inst.weights();
  double value = floored_utility(profits_of(inst, q), inst.fairness, duals.theta);
  for (Eigen::Index n = 0; n < q.rows(); ++n) {
    value -= duals.delta[n] * (q.row(n).dot(k) - inst.suppliers[static_cast<std::size_t>(n)].capacity);
  }
  value += duals.xi.dot(q.colwise().sum().transpose() - inst.demand());
  if (inst.emissions_capped()) {
    value -= duals.zeta * (instance_emissions(inst, market::AllocationMatrix(q)) - inst.emissions_cap);
  }
  return value;
}

Scales scales(const ProblemInstance& inst) {
  Scales s;
  s.energy = inst.demand().maxCoeff();
  double w_max = 0.0;
  for (const auto& sup : inst.suppliers) w_max = std::max(w_max, sup.benchmark_price);
  s.profit = s.energy * w_max;
  s.weight = inst.weights().maxCoeff();

  const Eigen::MatrixXd q = proportional_allocation(inst);
  const Eigen::VectorXd theta =
      Eigen::VectorXd::Constant(inst.n_suppliers(), 1.0 / static_cast<double>(inst.n_suppliers()));
  const Eigen::VectorXd omega = utility_weights(profits_of(inst, q), inst.fairness, theta);
  const Eigen::VectorXd k = inst.weights();
  double g = 0.0;
  double e = 0.0;
  for (Eigen::Index n = 0; n < q.rows(); ++n) {
    const auto& sup = inst.suppliers[static_cast<std::size_t>(n)];
    for (Eigen::Index l = 0; l < q.cols(); ++l) {
      g = std::max(g, std::abs(omega[n] * market::marginal_profit(sup, q(n, l))));
      e = std::max(e, k[l] * (2.0 * sup.emis_quad * q(n, l) + sup.emis_lin));
    }
  }
  s.utility_grad = g > 0.0 ? g : 1.0;
  s.emissions_grad = e > 0.0 ? e : 1.0;
  return s;
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  // Sort-based Euclidean projection onto {x >= 0, sum x = 1}.
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) tau = t;
  }
  return (v.array() - tau).max(0.0);
}

Eigen::MatrixXd repair_balance(const ProblemInstance& inst, const Eigen::MatrixXd& q) {
  const Eigen::VectorXd d = inst.demand();
  const Eigen::MatrixXd fallback = proportional_allocation(inst);
  Eigen::MatrixXd out = q.cwiseMax(0.0);
  for (Eigen::Index l = 0; l < out.cols(); ++l) {
    const double col = out.col(l).sum();
    if (col > 0.0) {
      out.col(l) *= d[l] / col;
    } else {
      out.col(l) = fallback.col(l);
    }
  }
  return out;
}

}  // namespace detail
}  // namespace sgdrm::drm
