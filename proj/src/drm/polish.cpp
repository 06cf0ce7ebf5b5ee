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


#include <algorithm>
#include <cmath>
#include <sstream>

#include "drm/barrier.hpp"
#include "drm/internal.hpp"
#include "sgdrm/errors.hpp"

namespace sgdrm::drm {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Goal { kUtility, kEmissions };

// Variables are x = q / s_q in row-major order, followed by tau for max-min.
struct Layout {
  Index nr = 0;
  Index nop = 0;
  bool has_tau = false;
  double s_q = 1.0;
  double s_pi = 1.0;
  double s_c = 1.0;

  Index idx(Index n, Index l) const { return n * nop + l; }
  Index dim() const { return nr * nop + (has_tau ? 1 : 0); }
};

struct AllocationNlp : Layout {
  detail::NlpProblem problem;
};

// Scaled profit of supplier n with optional gradient / Hessian over all variables.
double scaled_profit(const ProblemInstance& inst, const Layout& nlp, Index n, const VectorXd& x,
                     VectorXd* g, MatrixXd* h) {
  const auto& s = inst.suppliers[static_cast<std::size_t>(n)];
  double p = 0.0;
  if (g) *g = VectorXd::Zero(x.size());
  for (Index l = 0; l < nlp.nop; ++l) {
    const Index j = nlp.idx(n, l);
    const double q = nlp.s_q * std::max(0.0, x[j]);
    p += q * (market::unit_price(s, q) - s.unit_cost) / nlp.s_pi;
    if (g) (*g)[j] = market::marginal_profit(s, q) * nlp.s_q / nlp.s_pi;
    if (h) (*h)(j, j) += market::marginal_profit_slope(s, q) * nlp.s_q * nlp.s_q / nlp.s_pi;
  }
  return p;
}

double scaled_emissions(const ProblemInstance& inst, const Layout& nlp, const VectorXd& x,
                        VectorXd* g, MatrixXd* h) {
  const VectorXd k = inst.weights();
  double c = 0.0;
  if (g) *g = VectorXd::Zero(x.size());
  for (Index n = 0; n < nlp.nr; ++n) {
    const auto& s = inst.suppliers[static_cast<std::size_t>(n)];
    for (Index l = 0; l < nlp.nop; ++l) {
      const Index j = nlp.idx(n, l);
      const double q = nlp.s_q * x[j];
      c += k[l] * (s.emis_quad * q * q + s.emis_lin * q) / nlp.s_c;
      if (g) (*g)[j] = k[l] * (2.0 * s.emis_quad * q + s.emis_lin) * nlp.s_q / nlp.s_c;
      if (h) (*h)(j, j) += 2.0 * k[l] * s.emis_quad * nlp.s_q * nlp.s_q / nlp.s_c;
    }
  }
  return c;
}

AllocationNlp build_nlp(const ProblemInstance& inst, Goal goal) {
  AllocationNlp nlp;
  nlp.nr = inst.n_suppliers();
  nlp.nop = inst.n_operators();
  const auto sc = detail::scales(inst);
  nlp.s_q = sc.energy;
  nlp.s_pi = sc.profit;
  nlp.has_tau = goal == Goal::kUtility && inst.max_min();
  const Index nq = nlp.nr * nlp.nop;
  const Index dim = nlp.dim();
  const VectorXd d = inst.demand();
  const VectorXd k = inst.weights();
  if (inst.emissions_capped()) {
    nlp.s_c = inst.emissions_cap;
  } else {
    const double c = instance_emissions(inst, market::AllocationMatrix(detail::proportional_allocation(inst)));
    nlp.s_c = c > 0.0 ? c : 1.0;
  }

  const Layout lay = nlp;
  auto& p = nlp.problem;
  p.eq_matrix = MatrixXd::Zero(nlp.nop, dim);
  p.eq_rhs = d / nlp.s_q;
  for (Index l = 0; l < nlp.nop; ++l) {
    for (Index n = 0; n < nlp.nr; ++n) p.eq_matrix(l, nlp.idx(n, l)) = 1.0;
  }

  for (Index n = 0; n < nlp.nr; ++n) {
    const double cap = inst.suppliers[static_cast<std::size_t>(n)].capacity;
    VectorXd grad = VectorXd::Zero(dim);
    for (Index l = 0; l < nlp.nop; ++l) grad[nlp.idx(n, l)] = k[l] * nlp.s_q / cap;
    p.inequalities.emplace_back([grad](const VectorXd& x, VectorXd* g, MatrixXd*) {
      if (g) *g = grad;
      return grad.dot(x) - 1.0;
    });
  }
  if (goal == Goal::kUtility && inst.emissions_capped()) {
    p.inequalities.emplace_back([&inst, lay](const VectorXd& x, VectorXd* g, MatrixXd* h) {
      return scaled_emissions(inst, lay, x, g, h) - 1.0;
    });
  }
  for (Index j = 0; j < nq; ++j) {
    p.inequalities.emplace_back([j, dim](const VectorXd& x, VectorXd* g, MatrixXd*) {
      if (g) {
        *g = VectorXd::Zero(dim);
        (*g)[j] = -1.0;
      }
      return -x[j];
    });
  }
  if (nlp.has_tau) {
    for (Index n = 0; n < nlp.nr; ++n) {
      p.inequalities.emplace_back([&inst, lay, n, nq](const VectorXd& x, VectorXd* g, MatrixXd* h) {
        MatrixXd hp = MatrixXd::Zero(x.size(), x.size());
        const double pr = scaled_profit(inst, lay, n, x, g, h ? &hp : nullptr);
        if (g) {
          *g = -*g;
          (*g)[nq] = 1.0;
        }
        if (h) *h -= hp;
        return x[nq] - pr;
      });
    }
  }

  if (goal == Goal::kEmissions) {
    p.objective = [&inst, lay, nq](const VectorXd& x, double& f, VectorXd* g, MatrixXd* h) {
      if ((x.head(nq).array() < -1e-12).any()) return false;
      f = scaled_emissions(inst, lay, x, g, h);
      return true;
    };
    return nlp;
  }

  const double alpha = inst.fairness;
  p.objective = [&inst, lay, nq, alpha](const VectorXd& x, double& f, VectorXd* g, MatrixXd* h) {
    if ((x.head(nq).array() < -1e-12).any()) return false;
    if (g) *g = VectorXd::Zero(x.size());
    if (lay.has_tau) {
      f = -x[nq];
      if (g) (*g)[nq] = -1.0;
      return true;
    }
    f = 0.0;
    VectorXd gp;
    MatrixXd hp;
    for (Index n = 0; n < lay.nr; ++n) {
      if (h) hp = MatrixXd::Zero(x.size(), x.size());
      const double pr = scaled_profit(inst, lay, n, x, g ? &gp : nullptr, h ? &hp : nullptr);
      double u1 = 1.0;
      double u2 = 0.0;
      if (alpha == 0.0) {
        f -= pr;
      } else {
        if (!(pr > 0.0)) return false;
        f -= alpha == 1.0 ? std::log(pr) : std::pow(pr, 1.0 - alpha) / (1.0 - alpha);
        u1 = std::pow(pr, -alpha);
        u2 = -alpha * std::pow(pr, -alpha - 1.0);
      }
      if (g) *g -= u1 * gp;
      if (h) *h -= u2 * gp * gp.transpose() + u1 * hp;
    }
    return true;
  };
  return nlp;
}

VectorXd flatten(const MatrixXd& q, double s_q) {
  const MatrixXd t = q.transpose();
  return Eigen::Map<const VectorXd>(t.data(), t.size()) / s_q;
}

MatrixXd unflatten(const AllocationNlp& nlp, const VectorXd& x) {
  MatrixXd q(nlp.nr, nlp.nop);
  for (Index n = 0; n < nlp.nr; ++n) {
    for (Index l = 0; l < nlp.nop; ++l) q(n, l) = nlp.s_q * x[nlp.idx(n, l)];
  }
  return q;
}

bool strictly_feasible(const AllocationNlp& nlp, const VectorXd& x) {
  for (const auto& h : nlp.problem.inequalities) {
    if (!(h(x, nullptr, nullptr) < 0.0)) return false;
  }
  double f = 0.0;
  return nlp.problem.objective(x, f, nullptr, nullptr);
}

void check_capacity(const ProblemInstance& inst) {
  const VectorXd k = inst.weights();
  const double need = k.dot(inst.demand());
  double have = 0.0;
  for (const auto& s : inst.suppliers) have += s.capacity;
  if (!(need < have)) {
    std::ostringstream msg;
    msg << "aggregate capacity " << have << " J does not strictly exceed weighted demand " << need
        << " J";
    throw InfeasibleInstance(msg.str(), "capacity");
  }
}

// Barrier minimiser of emissions; strictly interior (no crossover).
MatrixXd greenest_point(const ProblemInstance& inst) {
  check_capacity(inst);
  const AllocationNlp nlp = build_nlp(inst, Goal::kEmissions);
  const VectorXd x0 = flatten(detail::proportional_allocation(inst), nlp.s_q);
  detail::BarrierOptions opts;
  opts.crossover = false;
  return unflatten(nlp, detail::solve_barrier(nlp.problem, x0, opts).x);
}

// A point strictly inside every constraint (and the utility domain) of `inst`.
VectorXd strict_start(const ProblemInstance& inst, const AllocationNlp& nlp) {
  check_capacity(inst);
  const Index nq = nlp.nr * nlp.nop;
  MatrixXd q = detail::proportional_allocation(inst);
  if (inst.emissions_capped()) {
    const double cp = instance_emissions(inst, market::AllocationMatrix(q));
    if (!(cp < inst.emissions_cap)) {
      const MatrixXd qg = greenest_point(inst);
      const double cg = instance_emissions(inst, market::AllocationMatrix(qg));
      if (!(cg < inst.emissions_cap)) {
        std::ostringstream msg;
        msg << "emissions cap " << inst.emissions_cap << " is not above the greenest attainable "
            << cg;
        throw InfeasibleInstance(msg.str(), "emissions");
      }
      // C is convex, so the mix stays below the chord value.
      const double target = 0.5 * (inst.emissions_cap + cg);
      const double s = std::clamp((cp - target) / (cp - cg), 0.0, 1.0);
      q = (1.0 - s) * q + s * qg;
    }
  }
  VectorXd x = VectorXd::Zero(nlp.dim());
  x.head(nq) = flatten(q, nlp.s_q);

  const bool needs_positive = inst.fairness > 0.0;
  if (needs_positive) {
    const VectorXd profits = detail::profits_of(inst, q);
    if (!(profits.minCoeff() > 0.0)) {
      ProblemInstance mm = inst;
      mm.fairness = kMaxMinFairness;
      const AllocationNlp mm_nlp = build_nlp(mm, Goal::kUtility);
      VectorXd y = VectorXd::Zero(mm_nlp.dim());
      y.head(nq) = x.head(nq);
      const VectorXd p0 = detail::profits_of(mm, q) / mm_nlp.s_pi;
      y[nq] = p0.minCoeff() - 0.1 * std::max(1e-3, std::abs(p0.minCoeff()));
      detail::BarrierOptions opts;
      opts.crossover = false;
      opts.gap_tol = 1e-9;
      const VectorXd ys = detail::solve_barrier(mm_nlp.problem, y, opts).x;
      const MatrixXd qs = unflatten(mm_nlp, ys);
      const VectorXd ps = detail::profits_of(inst, qs);
      if (!(ps.minCoeff() > 0.0)) {
        std::ostringstream msg;
        msg << "no feasible allocation gives every supplier a positive profit (best minimum "
            << ps.minCoeff() << ")";
        throw InfeasibleInstance(msg.str(), "profit-positivity");
      }
      x.head(nq) = ys.head(nq);
    }
  }
  if (nlp.has_tau) {
    const VectorXd p0 = detail::profits_of(inst, unflatten(nlp, x)) / nlp.s_pi;
    x[nq] = p0.minCoeff() - 0.1 * std::max(1e-3, std::abs(p0.minCoeff()));
  }
  return x;
}

}  // namespace

double greenest_emissions(const ProblemInstance& inst) {
  inst.validate();
  return instance_emissions(inst, market::AllocationMatrix(greenest_point(inst)));
}

void precheck(const ProblemInstance& inst) {
  inst.validate();
  const AllocationNlp nlp = build_nlp(inst, Goal::kUtility);
  strict_start(inst, nlp);
}

Solution solve_interior_point(const ProblemInstance& inst,
                              const std::optional<market::AllocationMatrix>& warm_start) {
  inst.validate();
  const AllocationNlp nlp = build_nlp(inst, Goal::kUtility);
  const Index nq = nlp.nr * nlp.nop;
  VectorXd x0 = strict_start(inst, nlp);
  if (warm_start) {
    warm_start->validate(inst.n_suppliers(), inst.n_operators());
    VectorXd xw = x0;
    xw.head(nq) = 0.9 * flatten(detail::repair_balance(inst, warm_start->q), nlp.s_q) + 0.1 * x0.head(nq);
    if (nlp.has_tau) {
      const VectorXd p0 = detail::profits_of(inst, unflatten(nlp, xw)) / nlp.s_pi;
      xw[nq] = p0.minCoeff() - 0.1 * std::max(1e-3, std::abs(p0.minCoeff()));
    }
    if (strictly_feasible(nlp, xw)) x0 = xw;
  }

  const detail::NlpResult r = detail::solve_barrier(nlp.problem, x0);

  MatrixXd q = unflatten(nlp, r.x);
  for (Index i = 0; i < q.size(); ++i) {
    if (q.data()[i] < 1e-12 * nlp.s_q) q.data()[i] = 0.0;
  }
  // Balance is exact in exact arithmetic; remove the rounding residue.
  const VectorXd d = inst.demand();
  for (Index l = 0; l < q.cols(); ++l) {
    const double col = q.col(l).sum();
    if (col > 0.0) q.col(l) *= d[l] / col;
  }

  double s_u = nlp.s_pi;
  if (inst.fairness == 1.0) {
    s_u = 1.0;
  } else if (inst.fairness > 0.0 && !inst.max_min()) {
    s_u = std::pow(nlp.s_pi, 1.0 - inst.fairness);
  }
  DualState duals = DualState::zeros(inst);
  Index i = 0;
  for (Index n = 0; n < nlp.nr; ++n, ++i) {
    duals.delta[n] = r.lambda[i] * s_u / inst.suppliers[static_cast<std::size_t>(n)].capacity;
  }
  if (inst.emissions_capped()) duals.zeta = r.lambda[i++] * s_u / inst.emissions_cap;
  i += nq;
  if (nlp.has_tau) {
    for (Index n = 0; n < nlp.nr; ++n, ++i) duals.theta[n] = r.lambda[i];
    duals.theta = detail::project_simplex(duals.theta);
  }
  duals.xi = -r.nu * s_u / nlp.s_q;

  Diagnostics diag;
  diag.method = "interior-point";
  diag.iterations = r.newton_steps;
  diag.converged = r.converged;
  diag.polished = true;
  if (!r.crossover) diag.notes.emplace_back("active-set refinement rejected; central-path multipliers");
  Solution sol = evaluate(inst, market::AllocationMatrix(q), duals, diag);
  sol.diagnostics.kkt_residual = kkt_residual(inst, sol);
  sol.diagnostics.dual_bound = dual_function(inst, sol.duals);
  return sol;
}

}  // namespace sgdrm::drm
