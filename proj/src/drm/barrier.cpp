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


#include "drm/barrier.hpp"

#include <cmath>
#include <limits>

namespace sgdrm::drm::detail {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

bool barrier_value(const NlpProblem& p, const VectorXd& x, double t, double& phi) {
  double f = 0.0;
  if (!p.objective(x, f, nullptr, nullptr) || !std::isfinite(f)) return false;
  double logs = 0.0;
  for (const auto& h : p.inequalities) {
    const double v = h(x, nullptr, nullptr);
    if (!(v < 0.0)) return false;
    logs += std::log(-v);
  }
  phi = t * f - logs;
  return true;
}

void barrier_derivatives(const NlpProblem& p, const VectorXd& x, double t, VectorXd& g, MatrixXd& H) {
  const auto dim = x.size();
  double f = 0.0;
  VectorXd gf(dim);
  MatrixXd hf = MatrixXd::Zero(dim, dim);
  p.objective(x, f, &gf, &hf);
  g = t * gf;
  H = t * hf;
  VectorXd gi(dim);
  MatrixXd hi(dim, dim);
  for (const auto& h : p.inequalities) {
    hi.setZero();
    const double v = h(x, &gi, &hi);
    g += gi / -v;
    H += gi * gi.transpose() / (v * v) + hi / -v;
  }
}

MatrixXd null_space(const MatrixXd& a, Eigen::Index dim) {
  if (a.rows() == 0) return MatrixXd::Identity(dim, dim);
  Eigen::HouseholderQR<MatrixXd> qr(a.transpose());
  const MatrixXd q = qr.householderQ() * MatrixXd::Identity(dim, dim);
  return q.rightCols(dim - a.rows());
}

// Newton direction with the reduced Hessian's eigenvalues replaced by their
// magnitudes (floored), so the step is a descent direction when H is indefinite.
// `curvature` receives the most negative-curvature direction when one exists.
VectorXd modified_newton(const MatrixXd& h, const VectorXd& rhs, VectorXd& curvature) {
  curvature.resize(0);
  Eigen::LLT<MatrixXd> llt(h);
  if (llt.info() == Eigen::Success) return llt.solve(rhs);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(h);
  const VectorXd& ev = eig.eigenvalues();
  const double floor = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  const VectorXd inv = ev.cwiseAbs().cwiseMax(floor).cwiseInverse();
  if (ev[0] < -floor) curvature = eig.eigenvectors().col(0);
  return eig.eigenvectors() * inv.asDiagonal() * (eig.eigenvectors().transpose() * rhs);
}

// Lawson-Hanson nonnegative least squares: argmin ||M y - c|| subject to y >= 0.
VectorXd nnls(const MatrixXd& m, const VectorXd& c) {
  const auto n = m.cols();
  VectorXd y = VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    const VectorXd w = m.transpose() * (c - m * y);
    Eigen::Index best = -1;
    double best_w = 1e-14 * (1.0 + w.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      std::vector<Eigen::Index> cols;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
      }
      MatrixXd sub(m.rows(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = m.col(cols[k]);
      const VectorXd z = sub.completeOrthogonalDecomposition().solve(c);
      if (z.minCoeff() > 0.0) {
        y.setZero();
        for (std::size_t k = 0; k < cols.size(); ++k) y[cols[k]] = z[static_cast<Eigen::Index>(k)];
        break;
      }
      // Step back towards the previous iterate until a passive entry hits zero.
      double a = 1.0;
      for (std::size_t k = 0; k < cols.size(); ++k) {
        const double zk = z[static_cast<Eigen::Index>(k)];
        if (zk <= 0.0) a = std::min(a, y[cols[k]] / (y[cols[k]] - zk));
      }
      for (std::size_t k = 0; k < cols.size(); ++k) {
        y[cols[k]] += a * (z[static_cast<Eigen::Index>(k)] - y[cols[k]]);
        if (y[cols[k]] <= 1e-300) {
          y[cols[k]] = 0.0;
          passive[static_cast<std::size_t>(cols[k])] = false;
        }
      }
    }
  }
  return y;
}

// Newton's method on the KKT system of the guessed active set, followed by a
// nonnegative least-squares fit of the multipliers (the active set may be degenerate).
bool crossover(const NlpProblem& p, NlpResult& r, const std::vector<int>& active) {
  const auto dim = r.x.size();
  const auto ne = p.eq_matrix.rows();
  const auto na = static_cast<Eigen::Index>(active.size());
  const auto n = dim + ne + na;
  auto constraint = [&](Eigen::Index k) -> const NlpProblem::Inequality& {
    return p.inequalities[static_cast<std::size_t>(active[static_cast<std::size_t>(k)])];
  };

  VectorXd x = r.x;
  VectorXd nu = r.nu;
  VectorXd lam(na);
  for (Eigen::Index k = 0; k < na; ++k) lam[k] = r.lambda[active[static_cast<std::size_t>(k)]];

  VectorXd gf(dim);
  MatrixXd hf(dim, dim);
  VectorXd gi(dim);
  MatrixXd hi(dim, dim);
  MatrixXd ja(na, dim);
  double f = 0.0;
  for (int it = 0; it < 50; ++it) {
    hf.setZero();
    if (!p.objective(x, f, &gf, &hf)) return false;
    MatrixXd kkt = MatrixXd::Zero(n, n);
    VectorXd rhs(n);
    VectorXd stat = gf;
    if (ne > 0) stat += p.eq_matrix.transpose() * nu;
    MatrixXd hl = hf;
    for (Eigen::Index k = 0; k < na; ++k) {
      hi.setZero();
      const double v = constraint(k)(x, &gi, &hi);
      stat += lam[k] * gi;
      hl += lam[k] * hi;
      kkt.block(dim + ne + k, 0, 1, dim) = gi.transpose();
      kkt.block(0, dim + ne + k, dim, 1) = gi;
      rhs[dim + ne + k] = -v;
    }
    kkt.topLeftCorner(dim, dim) = hl;
    if (ne > 0) {
      kkt.block(dim, 0, ne, dim) = p.eq_matrix;
      kkt.block(0, dim, dim, ne) = p.eq_matrix.transpose();
      rhs.segment(dim, ne) = p.eq_rhs - p.eq_matrix * x;
    }
    rhs.head(dim) = -stat;
    if (rhs.cwiseAbs().maxCoeff() < 1e-15 * (1.0 + gf.cwiseAbs().maxCoeff())) break;
    const VectorXd step = kkt.completeOrthogonalDecomposition().solve(rhs);
    if (!step.allFinite()) return false;
    x += step.head(dim);
    nu += step.segment(dim, ne);
    lam += step.tail(na);
  }

  // Primal checks at the refined point.
  if (!p.objective(x, f, &gf, nullptr)) return false;
  std::vector<bool> is_active(p.inequalities.size(), false);
  for (Eigen::Index k = 0; k < na; ++k) {
    is_active[static_cast<std::size_t>(active[static_cast<std::size_t>(k)])] = true;
    const double v = constraint(k)(x, &gi, nullptr);
    if (std::abs(v) > 1e-12) return false;
    ja.row(k) = gi.transpose();
  }
  for (std::size_t i = 0; i < p.inequalities.size(); ++i) {
    if (!is_active[i] && p.inequalities[i](x, nullptr, nullptr) > 1e-14) return false;
  }
  if (ne > 0 && (p.eq_matrix * x - p.eq_rhs).cwiseAbs().maxCoeff() > 1e-12) return false;

  // Multipliers: eliminate the free nu by projecting onto null(A), then NNLS for lambda.
  MatrixXd proj = MatrixXd::Identity(dim, dim);
  if (ne > 0) {
    const MatrixXd at = p.eq_matrix.transpose();
    proj -= at * (p.eq_matrix * at).ldlt().solve(p.eq_matrix);
  }
  lam = na > 0 ? nnls(proj * ja.transpose(), -(proj * gf)) : VectorXd();
  VectorXd stat = gf;
  if (na > 0) stat += ja.transpose() * lam;
  if (ne > 0) {
    nu = p.eq_matrix.transpose().colPivHouseholderQr().solve(-stat);
    stat += p.eq_matrix.transpose() * nu;
  }
  if (stat.cwiseAbs().maxCoeff() > 1e-9 * (1.0 + gf.cwiseAbs().maxCoeff())) return false;

  r.x = x;
  r.nu = nu;
  r.lambda.setZero();
  for (Eigen::Index k = 0; k < na; ++k) r.lambda[active[static_cast<std::size_t>(k)]] = lam[k];
  return true;
}

}  // namespace

NlpResult solve_barrier(const NlpProblem& p, const VectorXd& x0, const BarrierOptions& options) {
  const auto dim = x0.size();
  const auto m = static_cast<double>(p.inequalities.size());
  const MatrixXd z = null_space(p.eq_matrix, dim);

  NlpResult r;
  r.x = x0;
  double t = options.t0;
  VectorXd g;
  MatrixXd h;
  bool budget_left = true;
  while (budget_left) {
    for (int inner = 0; inner < 200; ++inner) {
      barrier_derivatives(p, r.x, t, g, h);
      const VectorXd rg = z.transpose() * g;
      MatrixXd rh = z.transpose() * h * z;
      rh = 0.5 * (rh + rh.transpose());
      VectorXd negative;
      VectorXd dy = modified_newton(rh, -rg, negative);
      const double decrement = -rg.dot(dy);
      if (!(decrement > 1e-10)) {
        // Near a saddle of a nonconvex barrier function: follow negative curvature.
        if (negative.size() == 0) break;
        dy = rg.dot(negative) > 0.0 ? VectorXd(-negative) : negative;
      }
      const VectorXd dx = z * dy;
      double phi0 = 0.0;
      barrier_value(p, r.x, t, phi0);
      const double slope = g.dot(dx);
      double s = 1.0;
      double phi = 0.0;
      // Inside the quadratic-convergence region the full step is taken whenever it
      // stays in the domain; barrier values there are below rounding resolution.
      const bool quadratic = decrement < 0.25 && negative.size() == 0;
      while (s > 1e-20 && !(barrier_value(p, r.x + s * dx, t, phi) &&
                            ((quadratic && phi <= phi0 + 1e-13 * std::abs(phi0)) ||
                             (phi <= phi0 + 0.25 * s * slope && phi < phi0)))) {
        s *= 0.5;
      }
      if (!(s > 1e-20)) break;
      r.x += s * dx;
      const bool stalled = (s * dx).cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, r.x.cwiseAbs().maxCoeff());
      if (++r.newton_steps >= options.max_newton) {
        budget_left = false;
        break;
      }
      if (stalled) break;
    }
    if (m == 0.0 || m / t < options.gap_tol) {
      r.converged = budget_left;
      break;
    }
    t *= options.growth;
  }

  // Multipliers of the central path point and the least-squares equality multipliers.
  r.lambda = VectorXd::Zero(static_cast<Eigen::Index>(p.inequalities.size()));
  double f = 0.0;
  VectorXd gf(dim);
  MatrixXd hf = MatrixXd::Zero(dim, dim);
  p.objective(r.x, f, &gf, &hf);
  VectorXd stat = gf;
  VectorXd gi(dim);
  std::vector<int> active;
  for (std::size_t i = 0; i < p.inequalities.size(); ++i) {
    const double v = p.inequalities[i](r.x, &gi, nullptr);
    const auto k = static_cast<Eigen::Index>(i);
    r.lambda[k] = 1.0 / (-t * v);
    stat += r.lambda[k] * gi;
    if (-v < 1.0 / std::sqrt(t)) active.push_back(static_cast<int>(i));
  }
  if (p.eq_matrix.rows() > 0) {
    r.nu = p.eq_matrix.transpose().colPivHouseholderQr().solve(-stat);
  } else {
    r.nu.resize(0);
  }
  if (options.crossover) r.crossover = crossover(p, r, active);
  return r;
}

}  // namespace sgdrm::drm::detail
