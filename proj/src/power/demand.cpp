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


#include <cmath>

#include "sgdrm/errors.hpp"
#include "sgdrm/power.hpp"

namespace sgdrm::power {

void PowerModelParams::validate() const {
  if (!std::isfinite(amp_slope) || amp_slope <= 0.0) {
    throw InvalidArgument("PowerModelParams.amp_slope must be > 0");
  }
  if (!std::isfinite(site_offset) || site_offset < 0.0) {
    throw InvalidArgument("PowerModelParams.site_offset must be >= 0");
  }
  if (!std::isfinite(duration) || duration <= 0.0) {
    throw InvalidArgument("PowerModelParams.duration must be > 0");
  }
}

double users_per_bs(const geometry::OperatorSpec& op, double area) {
  if (!std::isfinite(area) || area <= 0.0) throw InvalidArgument("users_per_bs: area must be > 0");
  if (!(op.bs_density > 0.0)) throw InvalidArgument("users_per_bs: BS density must be > 0");
  if (!(op.user_density >= 0.0)) throw InvalidArgument("users_per_bs: user density must be >= 0");
  const double n_bs = op.bs_density * area;
  return op.user_density * area / n_bs;
}

OperatorDemand operator_demand(const geometry::OperatorSpec& op,
                               const geometry::PhysicsParams& phys, const PowerModelParams& pm,
                               double per_user_power) {
  op.validate();
  phys.validate();
  pm.validate();
  if (!std::isfinite(per_user_power) || per_user_power < 0.0) {
    throw InvalidArgument("operator_demand: per_user_power must be >= 0");
  }
  OperatorDemand d;
  d.operator_id = op.id;
  d.n_bs = op.bs_density * phys.area;
  d.users_per_bs = users_per_bs(op, phys.area);
  d.per_bs_radiated = per_user_power * d.users_per_bs;
  d.per_bs_consumed = pm.amp_slope * d.per_bs_radiated + pm.site_offset;
  d.total_energy = d.n_bs * d.per_bs_consumed * pm.duration;
  return d;
}

}  // namespace sgdrm::power
