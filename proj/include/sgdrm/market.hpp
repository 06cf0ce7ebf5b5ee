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
#include <span>
#include <string>
#include <vector>

namespace sgdrm::market {

/// One energy supplier. Energies are joules; prices are MU per joule-equivalent
/// unit in which the capacity is expressed.
struct SupplierSpec {
  std::string id;
  double benchmark_price = 1.0;  // w
  double unit_cost = 0.0;        // c
  double capacity = 1.0;         // joules
  double emis_quad = 0.0;        // psi
  double emis_lin = 0.0;         // phi
  int price_sensitivity = 0;     // gamma

  void validate() const;
  double base_margin() const { return benchmark_price - unit_cost; }
};

/// Supplier-by-operator energy matrix q(n, l) in joules.
struct AllocationMatrix {
  Eigen::MatrixXd q;

  AllocationMatrix() = default;
  explicit AllocationMatrix(Eigen::MatrixXd m) : q(std::move(m)) {}
  AllocationMatrix(Eigen::Index n_suppliers, Eigen::Index n_operators)
      : q(Eigen::MatrixXd::Zero(n_suppliers, n_operators)) {}

  Eigen::Index suppliers() const { return q.rows(); }
  Eigen::Index operators() const { return q.cols(); }
  void validate(Eigen::Index n_suppliers, Eigen::Index n_operators) const;
};

/// Dynamic unit price w * (q / capacity)^gamma; gamma = 0 is a flat price.
double unit_price(const SupplierSpec& sup, double q);

/// d/dq [q * (unit_price(q) - c)].
double marginal_profit(const SupplierSpec& sup, double q);

/// d^2/dq^2 [q * (unit_price(q) - c)].
double marginal_profit_slope(const SupplierSpec& sup, double q);

/// psi * sum(q^2) + phi * sum(q) for one supplier's row.
double supplier_emissions(const SupplierSpec& sup, const Eigen::VectorXd& row);

double total_emissions(std::span<const SupplierSpec> suppliers, const AllocationMatrix& alloc);

/// sum_l q(l) * (unit_price(q(l)) - c). Negative when the dynamic price drops below cost.
double supplier_profit(const SupplierSpec& sup, const Eigen::VectorXd& row);

Eigen::VectorXd profits(std::span<const SupplierSpec> suppliers, const AllocationMatrix& alloc);

}  // namespace sgdrm::market
