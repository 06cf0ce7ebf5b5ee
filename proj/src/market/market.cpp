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


#include "sgdrm/market.hpp"

#include <cmath>
#include <sstream>

#include "sgdrm/errors.hpp"

namespace sgdrm::market {

namespace {

void check_row(const Eigen::VectorXd& row, const char* who) {
  for (Eigen::Index l = 0; l < row.size(); ++l) {
    if (!std::isfinite(row[l]) || row[l] < 0.0) {
      std::ostringstream msg;
      msg << who << ": entry " << l << " must be finite and >= 0 (got " << row[l] << ")";
      throw InvalidArgument(msg.str());
    }
  }
}

}  // namespace

void SupplierSpec::validate() const {
  auto fail = [this](const std::string& what) {
    throw InvalidArgument("SupplierSpec '" + id + "': " + what);
  };
  if (!std::isfinite(unit_cost) || unit_cost < 0.0) fail("unit_cost must be >= 0");
  if (!std::isfinite(benchmark_price) || benchmark_price <= unit_cost) {
    fail("benchmark_price must exceed unit_cost");
  }
  if (!std::isfinite(capacity) || capacity <= 0.0) fail("capacity must be > 0");
  if (!std::isfinite(emis_quad) || emis_quad < 0.0) fail("emis_quad must be >= 0");
  if (!std::isfinite(emis_lin) || emis_lin < 0.0) fail("emis_lin must be >= 0");
  if (price_sensitivity < 0) fail("price_sensitivity must be >= 0");
}

void AllocationMatrix::validate(Eigen::Index n_suppliers, Eigen::Index n_operators) const {
  if (q.rows() != n_suppliers || q.cols() != n_operators) {
    std::ostringstream msg;
    msg << "allocation is " << q.rows() << "x" << q.cols() << ", expected " << n_suppliers << "x"
        << n_operators;
    throw InvalidArgument(msg.str());
  }
  if (!q.allFinite() || (q.size() > 0 && q.minCoeff() < 0.0)) {
    throw InvalidArgument("allocation entries must be finite and >= 0");
  }
}

double unit_price(const SupplierSpec& sup, double q) {
  if (!std::isfinite(q) || q < 0.0) throw InvalidArgument("unit_price: q must be >= 0");
  if (sup.price_sensitivity == 0) return sup.benchmark_price;
  return sup.benchmark_price * std::pow(q / sup.capacity, sup.price_sensitivity);
}

double marginal_profit(const SupplierSpec& sup, double q) {
  const int g = sup.price_sensitivity;
  if (g == 0) return sup.base_margin();
  return sup.benchmark_price * (g + 1) * std::pow(q / sup.capacity, g) - sup.unit_cost;
}

double marginal_profit_slope(const SupplierSpec& sup, double q) {
  const int g = sup.price_sensitivity;
  if (g == 0) return 0.0;
  return sup.benchmark_price * g * (g + 1) * std::pow(q / sup.capacity, g - 1) / sup.capacity;
}

double supplier_emissions(const SupplierSpec& sup, const Eigen::VectorXd& row) {
  check_row(row, "supplier_emissions");
  return sup.emis_quad * row.squaredNorm() + sup.emis_lin * row.sum();
}

double total_emissions(std::span<const SupplierSpec> suppliers, const AllocationMatrix& alloc) {
  alloc.validate(static_cast<Eigen::Index>(suppliers.size()), alloc.operators());
  double total = 0.0;
  for (std::size_t n = 0; n < suppliers.size(); ++n) {
    total += supplier_emissions(suppliers[n], alloc.q.row(static_cast<Eigen::Index>(n)).transpose());
  }
  return total;
}

double supplier_profit(const SupplierSpec& sup, const Eigen::VectorXd& row) {
  check_row(row, "supplier_profit");
  double profit = 0.0;
  for (Eigen::Index l = 0; l < row.size(); ++l) {
    profit += row[l] * (unit_price(sup, row[l]) - sup.unit_cost);
  }
  return profit;
}

Eigen::VectorXd profits(std::span<const SupplierSpec> suppliers, const AllocationMatrix& alloc) {
  alloc.validate(static_cast<Eigen::Index>(suppliers.size()), alloc.operators());
  Eigen::VectorXd out(static_cast<Eigen::Index>(suppliers.size()));
  for (std::size_t n = 0; n < suppliers.size(); ++n) {
    const auto i = static_cast<Eigen::Index>(n);
    out[i] = supplier_profit(suppliers[n], alloc.q.row(i).transpose());
  }
  return out;
}

}  // namespace sgdrm::market
