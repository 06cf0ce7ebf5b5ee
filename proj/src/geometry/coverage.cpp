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


#include "sgdrm/geometry.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "sgdrm/errors.hpp"

namespace sgdrm::geometry {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
constexpr double kInterferenceAbsTol = 1e-10;
constexpr double kCoverageAbsTol = 1e-8;
// The outer integrand is truncated where it has decayed to this fraction of its peak.
constexpr double kTruncation = 1e-14;
constexpr unsigned kMaxDepth = 30;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace

void OperatorSpec::validate() const {
  require(positive_finite(bs_density), "OperatorSpec.bs_density must be > 0");
  require(std::isfinite(user_density) && user_density >= 0.0,
          "OperatorSpec.user_density must be >= 0");
  require(positive_finite(sinr_threshold), "OperatorSpec.sinr_threshold must be > 0");
  require(std::isfinite(coverage_target) && coverage_target > 0.0 && coverage_target < 1.0,
          "OperatorSpec.coverage_target must lie in (0, 1)");
}

void PhysicsParams::validate() const {
  if (!std::isfinite(path_loss_exp) || path_loss_exp <= 2.0) {
    throw DivergentIntegral("PhysicsParams.path_loss_exp must be > 2");
  }
  require(std::isfinite(noise_power) && noise_power >= 0.0,
          "PhysicsParams.noise_power must be >= 0");
  require(positive_finite(fading_rate), "PhysicsParams.fading_rate must be > 0");
  require(positive_finite(exclusion_distance), "PhysicsParams.exclusion_distance must be > 0");
  require(positive_finite(area), "PhysicsParams.area must be > 0");
}

double mhcpp_intensity(double bs_density, double exclusion_distance) {
  require(positive_finite(bs_density), "mhcpp_intensity: bs_density must be > 0");
  require(positive_finite(exclusion_distance), "mhcpp_intensity: exclusion_distance must be > 0");
  const double disk = kPi * exclusion_distance * exclusion_distance;
  // -expm1 keeps full precision when bs_density * disk is tiny.
  return -std::expm1(-bs_density * disk) / disk;
}

double interference_factor(double sinr_threshold, double path_loss_exp) {
  require(positive_finite(sinr_threshold), "interference_factor: sinr_threshold must be > 0");
  if (!std::isfinite(path_loss_exp) || path_loss_exp <= 2.0) {
    throw DivergentIntegral("interference_factor: integral diverges for path_loss_exp <= 2");
  }
  const double half_eta = 0.5 * path_loss_exp;
  const double scale = std::pow(sinr_threshold, 2.0 / path_loss_exp);
  const double lower = 1.0 / scale;
  auto head = [half_eta](double u) { return 1.0 / (1.0 + std::pow(u, half_eta)); };
  // The part beyond u = 1 is mapped to a finite interval with v = 1/u.
  auto tail = [half_eta](double v) { return std::pow(v, half_eta - 2.0) / (1.0 + std::pow(v, half_eta)); };

  double error = 0.0;
  double integral = 0.0;
  boost::math::quadrature::tanh_sinh<double> tanh_sinh;
  if (lower < 1.0) {
    double e = 0.0;
    integral += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(head, lower, 1.0, kMaxDepth, 1e-12, &e);
    error += e;
    integral += tanh_sinh.integrate(tail, 0.0, 1.0, 1e-14, &e);
    error += e * std::abs(integral);
  } else {
    integral = tanh_sinh.integrate(tail, 0.0, 1.0 / lower, 1e-14, &error);
    error *= std::abs(integral);
  }
  const double abs_error = scale * error;
  if (!std::isfinite(integral) || abs_error > kInterferenceAbsTol) {
    std::ostringstream msg;
    msg << "interference_factor: quadrature reached only " << abs_error << " (requested "
        << kInterferenceAbsTol << ")";
    throw NumericalError(msg.str(), abs_error);
  }
  return scale * integral;
}

double coverage_probability(const OperatorSpec& op, const PhysicsParams& phys,
                            double transmit_power) {
  op.validate();
  phys.validate();
  require(positive_finite(transmit_power), "coverage_probability: transmit_power must be > 0");

  const double lambda = op.bs_density;
  const double thinned = mhcpp_intensity(lambda, phys.exclusion_distance);
  const double rho = interference_factor(op.sinr_threshold, phys.path_loss_exp);

  // With s = r^2 the outer integral becomes
  //   int_0^inf pi*lambda * exp(-pi*(lambda + thinned*rho)*s - noise_coeff * s^(eta/2)) ds.
  const double decay = kPi * (lambda + thinned * rho);
  const double noise_coeff =
      phys.fading_rate * op.sinr_threshold * phys.noise_power / transmit_power;
  const double half_eta = 0.5 * phys.path_loss_exp;
  auto integrand = [=](double s) {
    return kPi * lambda * std::exp(-decay * s - noise_coeff * std::pow(s, half_eta));
  };
  const double upper = -std::log(kTruncation) / decay;

  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, upper, kMaxDepth, 1e-12, &error);
  if (!std::isfinite(value) || error > kCoverageAbsTol) {
    std::ostringstream msg;
    msg << "coverage_probability: quadrature reached only " << error << " (requested "
        << kCoverageAbsTol << ")";
    throw NumericalError(msg.str(), error);
  }
  return value;
}

double coverage_ceiling(const OperatorSpec& op, const PhysicsParams& phys) {
  return coverage_probability(op, phys, kCeilingTransmitPower);
}

PowerSolveResult solve_transmit_power_detailed(const OperatorSpec& op, const PhysicsParams& phys,
                                               const PowerSolveOptions& options) {
  op.validate();
  phys.validate();
  require(phys.noise_power > 0.0,
          "solve_transmit_power: noise_power must be > 0 (coverage is flat in P_t otherwise)");

  const double target = op.coverage_target;
  const double ceiling = coverage_ceiling(op, phys);
  if (target >= ceiling) {
    std::ostringstream msg;
    msg << "coverage target " << target << " of operator '" << op.id
        << "' is not below the interference-limited ceiling " << ceiling;
    throw InfeasibleQoS(msg.str(), ceiling);
  }

  // Work in x = ln(P_t); coverage is a smooth sigmoid there.
  auto residual = [&](double x) { return coverage_probability(op, phys, std::exp(x)) - target; };

  PowerSolveResult result;
  double hi = std::log(kCeilingTransmitPower);
  double lo = std::log(1e-3);
  double f_lo = residual(lo);
  while (f_lo >= 0.0) {
    lo -= std::log(1e3);
    if (lo < std::log(1e-40)) {
      throw NumericalError("solve_transmit_power: no lower bracket above 1e-40 W", f_lo);
    }
    f_lo = residual(lo);
  }

  double x = 0.5 * (lo + hi);
  double fx = residual(x);
  constexpr double kSlopeStep = 1e-4;
  for (int it = 1; it <= options.max_iterations; ++it) {
    result.iterations = it;
    if (std::abs(fx) <= options.tolerance) {
      result.transmit_power = std::exp(x);
      result.coverage = fx + target;
      return result;
    }
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }

    double next = 0.5 * (lo + hi);
    bool bisect = true;
    if (options.method == PowerSearch::kNewtonBisection) {
      const double slope = (residual(x + kSlopeStep) - residual(x - kSlopeStep)) / (2.0 * kSlopeStep);
      if (slope > 0.0 && std::isfinite(slope)) {
        const double newton = x - fx / slope;
        if (newton > lo && newton < hi) {
          next = newton;
          bisect = false;
        }
      }
    }
    if (bisect) ++result.bisection_steps;
    x = next;
    fx = residual(x);
  }
  throw NumericalError("solve_transmit_power: no convergence within iteration budget", std::abs(fx));
}

}  // namespace sgdrm::geometry
