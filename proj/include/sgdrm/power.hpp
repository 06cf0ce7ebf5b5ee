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

#include "sgdrm/geometry.hpp"

namespace sgdrm::power {

/// Linear BS consumption model P_BS = amp_slope * P_tx + site_offset, over `duration`.
struct PowerModelParams {
  double amp_slope = 7.84;
  double site_offset = 71.5;  // watts
  double duration = 1.0;      // seconds

  void validate() const;
};

struct OperatorDemand {
  std::string operator_id;
  double n_bs = 0.0;             // expected BS count, bs_density * area (not rounded)
  double users_per_bs = 0.0;
  double per_bs_radiated = 0.0;  // watts
  double per_bs_consumed = 0.0;  // watts
  double total_energy = 0.0;     // joules over the duration
};

/// Mean users served per BS, lambda_u * A / (lambda_BS * A).
double users_per_bs(const geometry::OperatorSpec& op, double area);

/// Network energy needed by one operator when each BS radiates
/// `per_user_power` per served user.
OperatorDemand operator_demand(const geometry::OperatorSpec& op,
                               const geometry::PhysicsParams& phys, const PowerModelParams& pm,
                               double per_user_power);

}  // namespace sgdrm::power
