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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace sgdrm {

/// Bad input value (non-finite, out of range, mismatched dimensions).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Integral is divergent for the requested parameters (path-loss exponent <= 2).
class DivergentIntegral : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quadrature or iterative method failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Coverage target at or above the interference-limited ceiling.
class InfeasibleQoS : public std::runtime_error {
 public:
  InfeasibleQoS(const std::string& what, double ceiling)
      : std::runtime_error(what), ceiling_(ceiling) {}
  double ceiling() const noexcept { return ceiling_; }

 private:
  double ceiling_;
};

/// Utility evaluated outside its domain (nonpositive profit with alpha > 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A closed-form branch whose denominator vanishes at entry (supplier, op).
class SingularBranch : public std::runtime_error {
 public:
  SingularBranch(const std::string& what, std::size_t supplier, std::size_t op)
      : std::runtime_error(what), supplier_(supplier), op_(op) {}
  std::size_t supplier() const noexcept { return supplier_; }
  std::size_t op() const noexcept { return op_; }

 private:
  std::size_t supplier_;
  std::size_t op_;
};

/// The Lagrangian is affine in an entry, so no interior stationary point exists.
class UnboundedStationarity : public SingularBranch {
 public:
  using SingularBranch::SingularBranch;
};

/// The allocation problem has no feasible point; `aggregate` names the
/// violated aggregate ("capacity", "emissions", "profit-positivity").
class InfeasibleInstance : public std::runtime_error {
 public:
  InfeasibleInstance(const std::string& what, std::string aggregate)
      : std::runtime_error(what), aggregate_(std::move(aggregate)) {}
  const std::string& aggregate() const noexcept { return aggregate_; }

 private:
  std::string aggregate_;
};

/// Brute-force oracle asked to enumerate too many dimensions or points.
class OracleScaleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Scenario configuration violates the schema.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& constraint)
      : std::runtime_error(field + ": " + constraint), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace sgdrm
