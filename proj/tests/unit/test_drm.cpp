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


#include <doctest.h>

#include <cmath>
#include <random>

#include "sgdrm/drm.hpp"
#include "sgdrm/errors.hpp"
#include "support.hpp"

using namespace sgdrm;
using namespace sgdrm::drm;
using sgdrm::testing::demand;
using sgdrm::testing::supplier;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

ProblemInstance two_by_two(double alpha) {
  ProblemInstance inst;
  inst.operators = {demand("op1", 60e3), demand("op2", 80e3)};
  inst.suppliers = {supplier("sup1", 1, 0.1, 150e3, 0.004, 0.001), supplier("sup2", 2, 0.5, 150e3, 0.002, 0.0005)};
  inst.emissions_cap = 3e7;
  inst.fairness = alpha;
  return inst;
}

void check_feasible(const ProblemInstance& inst, const Solution& sol) {
  const auto c = check_constraints(inst, sol.allocation);
  CHECK(c.capacity_slack.minCoeff() >= -1e-6);
  CHECK((c.balance_residual.array().abs() / inst.demand().array()).maxCoeff() <= 1e-4);
  CHECK(c.emissions_slack >= -1e-6);
  CHECK(c.min_entry >= 0.0);
}

}  // namespace

TEST_SUITE("drm") {

TEST_CASE("utility branches") {
  CHECK(utility(vec({1, 1, 1}), 1.0) == doctest::Approx(0.0));
  CHECK(utility(vec({0.9, 1.5, 0.5}), 0.0) == doctest::Approx(2.9));
  CHECK(utility(vec({2, 3, 5}), kInf) == 2.0);
  CHECK(utility(vec({4}), 0.5) == doctest::Approx(4.0));
  CHECK(utility(vec({2}), 2.0) == doctest::Approx(-0.5));
  CHECK(utility(vec({-1, 2}), 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(utility(vec({-1, 2}), 1.0), DomainError);
  CHECK_THROWS_AS(utility(vec({0, 2}), 0.5), DomainError);
}

TEST_CASE("closed form hand example, per-BS weights") {
  ProblemInstance inst;
  inst.operators = {demand("op", 1e3, 10.0)};
  inst.suppliers = {supplier("s", 1.0, 0.1, 1e9, 0.004, 0.001)};
  inst.convention = EnergyConvention::kPerBsVerbatim;
  inst.emissions_cap = 1e12;
  auto d = DualState::zeros(inst);
  d.zeta = 1.0;
  const auto q = solve_closed_form(inst, d);
  CHECK(q.q(0, 0) == doctest::Approx(11.125).epsilon(1e-12));

  d.delta[0] = 1.0;  // numerator 0.9 - 10 - 0.01 < 0
  CHECK(solve_closed_form(inst, d).q(0, 0) == 0.0);
}

TEST_CASE("max-min with a single unit weight reduces to the sum case") {
  auto inst = two_by_two(0.0);
  auto d = DualState::zeros(inst);
  d.zeta = 2e-5;
  d.xi = vec({0.3, -0.1});
  const auto sum = solve_closed_form(inst, d);
  inst.fairness = kInf;
  for (int n = 0; n < 2; ++n) {
    d.theta.setZero();
    d.theta[n] = 1.0;
    const auto mm = solve_closed_form(inst, d);
    CHECK(mm.q.row(n).isApprox(sum.q.row(n), 1e-12));
  }
}

TEST_CASE("closed form singular and unbounded branches") {
  ProblemInstance inst;
  inst.operators = {demand("op", 1e3)};
  inst.suppliers = {supplier("s", 3.0, 2.5, 1e4, 0.0, 0.0001)};
  inst.emissions_cap = 1e12;
  auto d = DualState::zeros(inst);
  d.zeta = 1.0;
  CHECK_THROWS_AS(solve_closed_form(inst, d), UnboundedStationarity);

  // gamma = 1 with zeta psi = w / capacity: the quadratic term vanishes.
  inst.suppliers = {supplier("s", 2.0, 0.5, 1e3, 0.002, 0.0, 1)};
  try {
    (void)solve_closed_form(inst, d);
    FAIL("expected SingularBranch");
  } catch (const UnboundedStationarity&) {
    FAIL("wrong error type");
  } catch (const SingularBranch& e) {
    CHECK(e.supplier() == 0);
    CHECK(e.op() == 0);
  }
}

TEST_CASE("closed form needs supported alpha and gamma") {
  auto inst = two_by_two(0.5);
  CHECK_FALSE(inst.closed_form_applicable());
  CHECK_THROWS_AS(solve_closed_form(inst, DualState::zeros(inst)), InvalidArgument);
}

TEST_CASE("single supplier single operator is pinned by the balance") {
  ProblemInstance inst;
  inst.operators = {demand("op", 5e3)};
  inst.suppliers = {supplier("s", 1.0, 0.1, 1e4, 0.004, 0.001)};
  const auto sol = solve_dual_subgradient(inst, DualState::zeros(inst), 500, 0.5);
  CHECK(sol.allocation.q(0, 0) == doctest::Approx(5e3).epsilon(1e-9));
  CHECK(kkt_residual(inst, sol) < 1e-4);
}

TEST_CASE("linear program: the higher margin supplier fills first") {
  ProblemInstance inst;
  inst.operators = {demand("op", 100.0)};
  inst.suppliers = {supplier("a", 2.0, 0.5, 50.0, 0.0, 0.0), supplier("b", 1.0, 0.1, 200.0, 0.0, 0.0)};
  const auto oracle = brute_force_oracle(inst, 101);
  CHECK(oracle.allocation.q(0, 0) == doctest::Approx(50.0).epsilon(1e-9));
  CHECK(oracle.allocation.q(1, 0) == doctest::Approx(50.0).epsilon(1e-9));
  const auto sol = solve_dual_subgradient(inst, DualState::zeros(inst), 2000, 0.5);
  CHECK(sol.allocation.q(0, 0) == doctest::Approx(50.0).epsilon(1e-6));
  CHECK(sol.utility == doctest::Approx(120.0).epsilon(1e-9));
}

TEST_CASE("symmetric suppliers under proportional fairness split symmetrically") {
  ProblemInstance inst;
  inst.operators = {demand("op1", 100.0), demand("op2", 100.0)};
  inst.suppliers = {supplier("a", 2.0, 0.5, 300.0, 0.001, 0.001), supplier("b", 2.0, 0.5, 300.0, 0.001, 0.001)};
  inst.fairness = 1.0;
  const auto oracle = brute_force_oracle(inst, 41);
  CHECK(oracle.profits[0] == doctest::Approx(oracle.profits[1]).epsilon(0.05));
  const auto sol = solve_dual_subgradient(inst, DualState::zeros(inst), 500, 0.5);
  CHECK(sol.profits[0] == doctest::Approx(sol.profits[1]).epsilon(1e-6));
}

TEST_CASE("oracle scale limits") {
  ProblemInstance inst;
  for (int l = 0; l < 3; ++l) inst.operators.push_back(demand("op", 10.0));
  for (int n = 0; n < 4; ++n) inst.suppliers.push_back(supplier("s", 2.0, 0.5, 100.0, 0.0, 0.0));
  CHECK_THROWS_AS(brute_force_oracle(inst, 5), OracleScaleError);
  inst.suppliers.pop_back();
  CHECK_THROWS_AS(brute_force_oracle(inst, 201), OracleScaleError);
  CHECK_THROWS_AS(brute_force_oracle(inst, 100), OracleScaleError);  // 100^6 evaluations
}

TEST_CASE("oracle is deterministic") {
  const auto inst = two_by_two(1.0);
  const auto a = brute_force_oracle(inst, 60);
  const auto b = brute_force_oracle(inst, 60);
  CHECK(a.allocation.q == b.allocation.q);
  CHECK(a.diagnostics.resolution_bound > 0.0);
}

TEST_CASE("oracle dominance on a 2x2 instance") {
  for (double alpha : {0.0, 1.0, kInf}) {
    CAPTURE(alpha);
    const auto inst = two_by_two(alpha);
    const auto oracle = brute_force_oracle(inst, 120);
    const auto sol = solve_dual_subgradient(inst, DualState::zeros(inst), 3000, 0.5);
    CHECK(sol.utility >= oracle.utility - oracle.diagnostics.resolution_bound);
    CHECK(kkt_residual(inst, sol) < 1e-4);
  }
}

TEST_CASE("kkt residual probes") {
  const auto inst = two_by_two(0.0);
  const auto sol = solve_dual_subgradient(inst, DualState::zeros(inst), 3000, 0.5);
  CHECK(kkt_residual(inst, sol) < 1e-4);

  auto bumped = sol;
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  bumped.allocation.q.maxCoeff(&r, &c);
  bumped.allocation.q(r, c) *= 1.1;
  CHECK(kkt_residual(inst, bumped) > 1e-2);

  // Interior point of a linear program with zero duals: stationarity is the largest margin.
  ProblemInstance lp;
  lp.operators = {demand("op", 100.0)};
  lp.suppliers = {supplier("a", 2.0, 0.5, 300.0, 0.0, 0.0), supplier("b", 1.0, 0.1, 300.0, 0.0, 0.0)};
  Solution interior = evaluate(lp, market::AllocationMatrix(Eigen::MatrixXd::Constant(2, 1, 50.0)),
                               DualState::zeros(lp));
  CHECK(kkt_residual(lp, interior) == doctest::Approx(1.5));
}

TEST_CASE("general alpha uses the projected-gradient inner step") {
  for (double alpha : {0.5, 2.0}) {
    CAPTURE(alpha);
    const auto inst = two_by_two(alpha);
    const auto sol = solve_dual_subgradient(inst, DualState::zeros(inst), 300, 0.5);
    check_feasible(inst, sol);
    CHECK(kkt_residual(inst, sol) < 1e-4);
  }
}

TEST_CASE("weak duality and zero gap for the sum utility") {
  auto inst = sgdrm::testing::profile_instance();
  inst.fairness = 0.0;
  const auto sol = solve_dual_subgradient(inst, DualState::zeros(inst), 3000, 0.5);
  REQUIRE(std::isfinite(sol.diagnostics.dual_bound));
  CHECK(sol.diagnostics.dual_bound >= sol.utility - 1e-9 * std::abs(sol.utility));
  CHECK((sol.diagnostics.dual_bound - sol.utility) / std::abs(sol.utility) < 1e-3);
  CHECK(dual_function(inst, sol.duals) >= sol.utility - 1e-9 * std::abs(sol.utility));
  check_feasible(inst, sol);
}

TEST_CASE("linear program solutions sit on a vertex") {
  // Distinct per-BS weights make the optimum unique.
  ProblemInstance inst;
  inst.convention = EnergyConvention::kPerBsVerbatim;
  inst.operators = {demand("op1", 40.0, 1.0), demand("op2", 70.0, 0.5), demand("op3", 90.0, 0.25)};
  inst.suppliers = {supplier("a", 1.0, 0.1, 120.0, 0.0, 0.01), supplier("b", 2.0, 0.5, 80.0, 0.0, 0.005),
                    supplier("c", 3.0, 2.5, 150.0, 0.0, 0.001)};
  inst.emissions_cap = 1.2;
  const auto sol = solve_dual_subgradient(inst, DualState::zeros(inst), 3000, 0.5);
  check_feasible(inst, sol);
  const double tiny = 1e-9 * inst.demand().maxCoeff();
  const auto nonzero = (sol.allocation.q.array() > tiny).count();
  CHECK(nonzero <= inst.n_suppliers() + inst.n_operators() + 1);
}

TEST_CASE("infeasible aggregates are named") {
  auto inst = two_by_two(0.0);
  inst.operators = {demand("op1", 200e3), demand("op2", 200e3)};
  try {
    (void)solve_dual_subgradient(inst, DualState::zeros(inst), 10, 0.5);
    FAIL("expected InfeasibleInstance");
  } catch (const InfeasibleInstance& e) {
    CHECK(e.aggregate() == "capacity");
  }
  inst = two_by_two(0.0);
  inst.emissions_cap = 0.5 * greenest_emissions(inst);
  try {
    (void)solve_dual_subgradient(inst, DualState::zeros(inst), 10, 0.5);
    FAIL("expected InfeasibleInstance");
  } catch (const InfeasibleInstance& e) {
    CHECK(e.aggregate() == "emissions");
  }
}

TEST_CASE("random dual states are valid") {
  const auto inst = two_by_two(kInf);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto d = DualState::random(inst, s);
    CHECK_NOTHROW(d.validate(inst));
    CHECK(d.theta.sum() == doctest::Approx(1.0));
    CHECK(d.delta.minCoeff() >= 0.0);
  }
  auto bad = DualState::zeros(inst);
  bad.zeta = -1.0;
  CHECK_THROWS_AS(bad.validate(inst), InvalidArgument);
}

TEST_CASE("random starts reach the same optimum") {
  const auto inst = two_by_two(0.0);
  const auto a = solve_dual_subgradient(inst, DualState::zeros(inst), 3000, 0.5);
  const auto b = solve_dual_subgradient(inst, DualState::random(inst, 17), 3000, 0.5);
  CHECK(b.utility == doctest::Approx(a.utility).epsilon(1e-9));
}

TEST_CASE("interior point on the dynamic-price profile") {
  const auto inst = sgdrm::testing::profile_instance("fig1");
  const auto sol = solve_interior_point(inst);
  check_feasible(inst, sol);
  CHECK(kkt_residual(inst, sol) < 1e-4);
}

TEST_CASE("per-BS convention scales capacity and emissions") {
  ProblemInstance inst;
  inst.operators = {demand("op", 10.0, 5.0)};
  inst.suppliers = {supplier("a", 2.0, 0.5, 100.0, 0.01, 0.01), supplier("b", 1.0, 0.1, 100.0, 0.0, 0.01)};
  inst.convention = EnergyConvention::kPerBsVerbatim;
  CHECK(inst.weights()[0] == 5.0);
  const market::AllocationMatrix q(vec({4.0, 6.0}));
  CHECK(instance_emissions(inst, q) == doctest::Approx(5.0 * (0.01 * 16 + 0.04 + 0.06)));
  CHECK(check_constraints(inst, q).capacity_slack[0] == doctest::Approx(80.0));
}

}  // TEST_SUITE
