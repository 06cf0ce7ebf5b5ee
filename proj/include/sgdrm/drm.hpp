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
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sgdrm/market.hpp"
#include "sgdrm/power.hpp"

/// Demand-response allocation: suppliers split each operator's energy demand
/// so that an alpha-fair utility of supplier profits is maximised subject to
///
///   capacity   sum_l k_l * q(n,l) <= capacity_n          (multiplier delta_n >= 0)
///   balance    sum_n q(n,l)        = demand_l            (multiplier xi_l, free)
///   emissions  C(Q)               <= emissions_cap       (multiplier zeta >= 0)
///   max-min    profit_n           >= profit_min          (multiplier theta_n, alpha = inf)
///
/// with C(Q) = sum_n sum_l k_l * (psi_n q^2 + phi_n q) and Lagrangian
/// L = U - delta.(cap - capacity) + xi.(sum_n q - demand) - zeta (C - cap).
/// The weight k_l is 1 under EnergyConvention::kNetworkTotal and the
/// operator's BS count under kPerBsVerbatim.
namespace sgdrm::drm {

inline constexpr double kMaxMinFairness = std::numeric_limits<double>::infinity();

/// Profit floor used inside log/power utilities while iterating.
inline constexpr double kProfitFloor = 1e-6;

enum class EnergyConvention {
  kNetworkTotal,   // q is network energy; k_l = 1 (the baseline profile's capacities assume this)
  kPerBsVerbatim,  // k_l = N_BS of operator l in the capacity and emissions terms
};

struct ProblemInstance {
  std::vector<power::OperatorDemand> operators;
  std::vector<market::SupplierSpec> suppliers;
  double emissions_cap = std::numeric_limits<double>::infinity();  // kg/h; inf disables
  double fairness = 0.0;                                           // alpha >= 0 or inf
  EnergyConvention convention = EnergyConvention::kNetworkTotal;

  Eigen::Index n_suppliers() const { return static_cast<Eigen::Index>(suppliers.size()); }
  Eigen::Index n_operators() const { return static_cast<Eigen::Index>(operators.size()); }
  Eigen::VectorXd demand() const;
  Eigen::VectorXd weights() const;
  bool max_min() const { return fairness == kMaxMinFairness; }
  bool emissions_capped() const { return emissions_cap < std::numeric_limits<double>::infinity(); }
  /// True when the closed-form inner step applies (alpha in {0,1,inf}, gamma in {0,1}).
  bool closed_form_applicable() const;
  /// Dimensions, parameter ranges and suppliers; does not test feasibility.
  void validate() const;
};

struct DualState {
  Eigen::VectorXd delta;  // capacity, >= 0
  Eigen::VectorXd xi;     // balance, free sign
  double zeta = 0.0;      // emissions, >= 0
  Eigen::VectorXd theta;  // max-min weights on the simplex

  /// Zero multipliers with uniform theta.
  static DualState zeros(const ProblemInstance& inst);
  /// Random nonnegative multipliers (xi symmetric), uniform-random point on the simplex.
  static DualState random(const ProblemInstance& inst, std::uint64_t seed);
  void validate(const ProblemInstance& inst) const;
};

struct Diagnostics {
  std::string method;
  int iterations = 0;
  bool converged = false;
  bool polished = false;
  double max_violation = 0.0;      // relative, see ConstraintReport
  double kkt_residual = std::numeric_limits<double>::quiet_NaN();
  double dual_bound = std::numeric_limits<double>::quiet_NaN();
  double resolution_bound = 0.0;   // oracle only
  long evaluations = 0;            // oracle only
  Eigen::VectorXd production;      // sum_l q(n, l)
  Eigen::VectorXd weighted_production;  // sum_l N_BS(l) q(n, l)
  std::vector<std::string> notes;
};

struct Solution {
  market::AllocationMatrix allocation;
  Eigen::VectorXd profits;
  double utility = std::numeric_limits<double>::quiet_NaN();
  DualState duals;
  Diagnostics diagnostics;
};

struct ConstraintReport {
  Eigen::VectorXd capacity_slack;   // capacity_n - sum_l k_l q(n,l)
  Eigen::VectorXd balance_residual; // sum_n q(n,l) - demand_l
  double emissions = 0.0;           // C(Q)
  double emissions_slack = 0.0;     // cap - C(Q); +inf when uncapped
  double min_entry = 0.0;
  /// Largest of: capacity excess / capacity, |balance| / demand, emissions
  /// excess / cap, and -min_entry / max demand.
  double max_relative_violation = 0.0;
};

/// alpha-fair utility: sum (alpha = 0), sum log (1), min (inf), else
/// sum p^(1-alpha) / (1-alpha). Throws DomainError on a nonpositive profit when alpha > 0.
double utility(const Eigen::VectorXd& profits, double alpha);

/// Emissions C(Q) as the optimizer sees them (k-weighted; equals
/// market::total_emissions under kNetworkTotal).
double instance_emissions(const ProblemInstance& inst, const market::AllocationMatrix& alloc);

ConstraintReport check_constraints(const ProblemInstance& inst, const market::AllocationMatrix& alloc);

/// Profits, utility, production and violation for an allocation.
Solution evaluate(const ProblemInstance& inst, const market::AllocationMatrix& alloc,
                  DualState duals, Diagnostics diagnostics = {});

/// Minimum attainable C(Q) over capacity, balance and Q >= 0.
double greenest_emissions(const ProblemInstance& inst);

/// Throws InfeasibleInstance when aggregate capacity cannot cover demand, the
/// cap is below the greenest allocation, or (alpha > 0) some supplier cannot
/// earn a positive profit at a strictly feasible point.
void precheck(const ProblemInstance& inst);

/// Stationary allocation for fixed multipliers (alpha in {0, 1, inf},
/// gamma in {0, 1}), clamped at zero. For alpha = 1 the coupling through the
/// other suppliers' profits is resolved by damped fixed-point iteration.
/// Throws UnboundedStationarity when the Lagrangian is affine in an entry and
/// SingularBranch when a denominator is within 1e-12 of zero.
market::AllocationMatrix solve_closed_form(const ProblemInstance& inst, const DualState& duals);

enum class InnerStep {
  kClosedForm,         // clamped closed form on the box [0, u]
  kProjectedGradient,  // any alpha and gamma
};

struct SubgradientOptions {
  int max_iters = 3000;
  double step0 = 0.5;
  InnerStep inner = InnerStep::kClosedForm;
  double primal_tol = 1e-4;
  double dual_tol = 1e-6;
  /// Finish with an interior-point KKT solve warm-started from the recovered primal.
  bool polish = true;
};

/// Dual subgradient method with step step0 / sqrt(k). Returns the best feasible
/// iterate (polished when options.polish). Throws InfeasibleInstance from the precheck.
Solution solve_dual_subgradient(const ProblemInstance& inst, const DualState& init,
                                const SubgradientOptions& options);

inline Solution solve_dual_subgradient(const ProblemInstance& inst, const DualState& init,
                                       int max_iters, double step0) {
  SubgradientOptions opts;
  opts.max_iters = max_iters;
  opts.step0 = step0;
  opts.inner = inst.closed_form_applicable() ? InnerStep::kClosedForm : InnerStep::kProjectedGradient;
  return solve_dual_subgradient(inst, init, opts);
}

/// Interior-point solve of the full problem to KKT precision, optionally
/// warm-started. Reports exact multipliers.
Solution solve_interior_point(const ProblemInstance& inst,
                              const std::optional<market::AllocationMatrix>& warm_start = std::nullopt);

inline constexpr int kOracleMaxDims = 6;
inline constexpr int kOracleMaxGridPoints = 200;

/// Exhaustive grid search with the last supplier eliminated through the
/// balance constraint, followed by one 10x finer local grid around the
/// incumbent. Ties keep the first point in enumeration order.
Solution brute_force_oracle(const ProblemInstance& inst, int grid_points);

struct KktReport {
  double stationarity = 0.0;     // absolute, utility per joule
  double complementarity = 0.0;  // |multiplier * slack| / max(1, |U|)
  double primal = 0.0;           // ConstraintReport::max_relative_violation
  double dual_sign = 0.0;        // negative delta / zeta, theta off the simplex
  double total() const;
};

/// Relative entry threshold that defines the support of Q in the KKT test.
inline constexpr double kSupportThreshold = 1e-9;

KktReport kkt_report(const ProblemInstance& inst, const Solution& sol);
inline double kkt_residual(const ProblemInstance& inst, const Solution& sol) {
  return kkt_report(inst, sol).total();
}

/// Gradient of the Lagrangian with respect to q (alpha = inf uses theta).
Eigen::MatrixXd lagrangian_gradient(const ProblemInstance& inst, const market::AllocationMatrix& alloc,
                                    const DualState& duals);

/// Dual function value sup_{0 <= q <= u} L(Q, duals) for separable cases
/// (alpha in {0, inf}, gamma in {0, 1}); NaN otherwise.
double dual_function(const ProblemInstance& inst, const DualState& duals);

}  // namespace sgdrm::drm
