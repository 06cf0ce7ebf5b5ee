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
#include <sstream>

#include "sgdrm/drm.hpp"
#include "sgdrm/errors.hpp"

namespace sgdrm::drm {

double utility(const Eigen::VectorXd& profits, double alpha) {
  if (std::isnan(alpha) || alpha < 0.0) throw InvalidArgument("utility: alpha must be >= 0");
  if (profits.size() == 0) throw InvalidArgument("utility: empty profit vector");
  if (alpha == 0.0) return profits.sum();
  for (Eigen::Index n = 0; n < profits.size(); ++n) {
    if (!(profits[n] > 0.0)) {
      std::ostringstream msg;
      msg << "utility: profit of supplier " << n << " is " << profits[n]
          << "; alpha > 0 needs strictly positive profits";
      throw DomainError(msg.str());
    }
  }
  if (alpha == kMaxMinFairness) return profits.minCoeff();
  if (alpha == 1.0) return profits.array().log().sum();
  return (profits.array().pow(1.0 - alpha) / (1.0 - alpha)).sum();
}

}  // namespace sgdrm::drm
