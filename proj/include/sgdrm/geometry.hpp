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

namespace sgdrm::geometry {

/// One cellular operator. Densities are per m^2 and the SINR threshold is
/// linear; dB inputs are converted at config ingestion.
struct OperatorSpec {
  std::string id;
  double bs_density = 0.0;       // BS per m^2
  double user_density = 0.0;     // users per m^2
  double sinr_threshold = 1.0;   // linear
  double coverage_target = 0.5;  // in (0, 1)

  void validate() const;
};

struct PhysicsParams {
  double path_loss_exp = 4.0;         // > 2
  double noise_power = 0.0;           // watts, linear
  double fading_rate = 1.0;           // exponential fading with mean 1 / fading_rate
  double exclusion_distance = 1000.0; // meters
  double area = 1e8;                  // m^2

  void validate() const;
};

/// Transmit power used as the P_t -> infinity proxy for the coverage ceiling.
inline constexpr double kCeilingTransmitPower = 1e9;

/// Intensity of the Matern hard-core process obtained by thinning a PPP of
/// intensity `bs_density` with hard-core distance `exclusion_distance`.
double mhcpp_intensity(double bs_density, double exclusion_distance);

/// T^(2/eta) * int_{T^(-2/eta)}^inf du / (1 + u^(eta/2)), by adaptive
/// quadrature (absolute tolerance 1e-10). Throws DivergentIntegral for eta <= 2.
double interference_factor(double sinr_threshold, double path_loss_exp);

/// Downlink coverage probability P[SINR > T] of a typical user. The serving
/// distance follows the nearest-neighbour law of the full BS process; the
/// interferers are the thinned process approximated by a PPP.
double coverage_probability(const OperatorSpec& op, const PhysicsParams& phys,
                            double transmit_power);

/// Coverage at kCeilingTransmitPower.
double coverage_ceiling(const OperatorSpec& op, const PhysicsParams& phys);

enum class PowerSearch {
  kNewtonBisection,  // safeguarded Newton in log P_t
  kBisection,        // bisection only; independent cross-check
};

struct PowerSolveOptions {
  PowerSearch method = PowerSearch::kNewtonBisection;
  double tolerance = 1e-7;  // on |coverage - target|
  int max_iterations = 200;
};

struct PowerSolveResult {
  double transmit_power = 0.0;
  double coverage = 0.0;
  int iterations = 0;
  int bisection_steps = 0;
};

/// Transmit power that achieves `op.coverage_target`. Throws InfeasibleQoS
/// carrying the ceiling when the target is not attainable.
PowerSolveResult solve_transmit_power_detailed(const OperatorSpec& op, const PhysicsParams& phys,
                                               const PowerSolveOptions& options = {});

inline double solve_transmit_power(const OperatorSpec& op, const PhysicsParams& phys) {
  return solve_transmit_power_detailed(op, phys).transmit_power;
}

}  // namespace sgdrm::geometry
