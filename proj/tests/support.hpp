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

#include <string>

#include "sgdrm/drm.hpp"
#include "sgdrm/scenario.hpp"

namespace sgdrm::testing {

inline power::OperatorDemand demand(const std::string& id, double energy, double n_bs = 1.0) {
  power::OperatorDemand d;
  d.operator_id = id;
  d.n_bs = n_bs;
  d.total_energy = energy;
  return d;
}

inline market::SupplierSpec supplier(const std::string& id, double w, double c, double cap, double psi, double phi,
                                     int gamma = 0) {
  market::SupplierSpec s;
  s.id = id;
  s.benchmark_price = w;
  s.unit_cost = c;
  s.capacity = cap;
  s.emis_quad = psi;
  s.emis_lin = phi;
  s.price_sensitivity = gamma;
  return s;
}

/// Allocation problem of a built-in profile: demands from the coverage and
/// power model, market data from the profile.
inline drm::ProblemInstance profile_instance(const std::string& profile = "paper-baseline") {
  const auto cfg = scenario::parse_config(scenario::profile_document(profile));
  drm::ProblemInstance inst;
  inst.suppliers = cfg.suppliers;
  inst.emissions_cap = cfg.emissions_cap;
  inst.fairness = cfg.fairness;
  inst.convention = cfg.convention;
  for (const auto& op : cfg.operators) {
    inst.operators.push_back(power::operator_demand(op, cfg.physics, cfg.power_model,
                                                    geometry::solve_transmit_power(op, cfg.physics)));
  }
  return inst;
}

inline double spread(const Eigen::VectorXd& profits) { return profits.maxCoeff() - profits.minCoeff(); }

}  // namespace sgdrm::testing
