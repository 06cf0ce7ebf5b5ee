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


#include <exception>

#include "sgdrm/errors.hpp"
#include "sgdrm/scenario.hpp"

namespace sgdrm::scenario {

namespace {

drm::Solution solve(const drm::ProblemInstance& inst, const SolverSpec& spec) {
  if (spec.method == SolverChoice::kOracle) return drm::brute_force_oracle(inst, spec.oracle_grid);
  drm::SubgradientOptions opts;
  opts.max_iters = spec.max_iters;
  opts.step0 = spec.step0;
  switch (spec.method) {
    case SolverChoice::kClosed:
      opts.inner = drm::InnerStep::kClosedForm;
      break;
    case SolverChoice::kSubgradient:
      opts.inner = drm::InnerStep::kProjectedGradient;
      break;
    default:
      opts.inner = inst.closed_form_applicable() ? drm::InnerStep::kClosedForm
                                                 : drm::InnerStep::kProjectedGradient;
  }
  return drm::solve_dual_subgradient(inst, drm::DualState::zeros(inst), opts);
}

void fill_market(SweepResult& r, const drm::ProblemInstance& inst, const drm::Solution& sol) {
  const auto& q = sol.allocation.q;
  const Eigen::VectorXd demand = inst.demand();
  const Eigen::VectorXd k = inst.weights();
  for (std::size_t l = 0; l < r.operators.size(); ++l) {
    const auto col = static_cast<Eigen::Index>(l);
    double paid = 0.0;
    for (Eigen::Index n = 0; n < q.rows(); ++n) {
      paid += q(n, col) * market::unit_price(inst.suppliers[static_cast<std::size_t>(n)], q(n, col));
    }
    r.operators[l].price = demand[col] > 0.0 ? paid / demand[col] : 0.0;
  }
  for (std::size_t n = 0; n < inst.suppliers.size(); ++n) {
    const auto row = static_cast<Eigen::Index>(n);
    SupplierResult s;
    s.id = inst.suppliers[n].id;
    s.production = sol.diagnostics.production[row];
    s.profit = sol.profits[row];
    const auto& sup = inst.suppliers[n];
    for (Eigen::Index l = 0; l < q.cols(); ++l) {
      s.emissions += k[l] * (sup.emis_quad * q(row, l) * q(row, l) + sup.emis_lin * q(row, l));
    }
    r.suppliers.push_back(s);
  }
}

}  // namespace

SweepResult run_point(const ScenarioConfig& base, std::optional<double> axis_value, std::uint64_t point_index) {
  SweepResult r;
  r.axis_value = axis_value;
  try {
    const ScenarioConfig cfg = axis_value ? config_at(base, *axis_value) : base;
    drm::ProblemInstance inst;
    inst.suppliers = cfg.suppliers;
    inst.emissions_cap = cfg.emissions_cap;
    inst.fairness = cfg.fairness;
    inst.convention = cfg.convention;
    for (std::size_t l = 0; l < cfg.operators.size(); ++l) {
      const auto& op = cfg.operators[l];
      const auto power = geometry::solve_transmit_power_detailed(op, cfg.physics);
      const auto demand = power::operator_demand(op, cfg.physics, cfg.power_model, power.transmit_power);
      OperatorResult o;
      o.id = op.id;
      o.transmit_power = power.transmit_power;
      o.coverage = power.coverage;
      o.n_bs = demand.n_bs;
      o.users_per_bs = demand.users_per_bs;
      o.energy = demand.total_energy;
      if (cfg.mc.trials > 0) {
        const auto seed = spatial::derive_seed(spatial::derive_seed(cfg.mc.seed, point_index), l);
        o.empirical = spatial::empirical_coverage(op, cfg.physics, power.transmit_power, cfg.mc.trials, seed);
      }
      r.operators.push_back(o);
      inst.operators.push_back(demand);
    }
    drm::Solution sol = solve(inst, cfg.solver);
    fill_market(r, inst, sol);
    r.feasible = true;
    r.status = sol.diagnostics.converged ? "ok" : "not-converged";
    for (const auto& note : sol.diagnostics.notes) r.reason += (r.reason.empty() ? "" : "; ") + note;
    r.solution = std::move(sol);
  } catch (const InfeasibleQoS& e) {
    r.status = "infeasible-qos";
    r.reason = e.what();
  } catch (const InfeasibleInstance& e) {
    r.status = "infeasible-" + e.aggregate();
    r.reason = e.what();
  } catch (const ConfigError& e) {
    r.status = "config-error";
    r.reason = e.what();
  } catch (const std::exception& e) {
    r.status = "solver-error";
    r.reason = e.what();
  }
  if (!r.feasible) {
    r.operators.clear();
    r.suppliers.clear();
  }
  return r;
}

std::vector<SweepResult> run_pipeline(const ScenarioConfig& cfg) {
  if (!cfg.sweep) return {run_point(cfg, std::nullopt, 0)};
  // Surface invalid sweep values as configuration errors before any solve.
  for (double v : cfg.sweep->values) (void)config_at(cfg, v);
  std::vector<SweepResult> out;
  for (std::size_t i = 0; i < cfg.sweep->values.size(); ++i) {
    out.push_back(run_point(cfg, cfg.sweep->values[i], i));
  }
  return out;
}

int exit_code(const std::vector<SweepResult>& results) {
  for (const auto& r : results) {
    if (r.status != "ok") return 2;
  }
  return 0;
}

}  // namespace sgdrm::scenario
