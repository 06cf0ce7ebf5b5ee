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
#include <thread>

#include "drm/internal.hpp"
#include "sgdrm/errors.hpp"

namespace sgdrm::drm {

namespace {

// Upper limit on grid evaluations per pass, independent of the per-dimension cap.
constexpr double kMaxEvaluations = 2e8;

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  long index = -1;
};

// Enumerates a tensor grid whose axis d has `counts[d]` points lo[d] + i * step[d]
// and returns the best feasible point (ties keep the lowest linear index).
class GridSearch {
 public:
  GridSearch(const ProblemInstance& inst, std::vector<std::pair<Eigen::Index, Eigen::Index>> free)
      : inst_(inst), free_(std::move(free)), k_(inst.weights()), d_(inst.demand()), upper_(detail::box_upper(inst)) {}

  std::optional<double> value(const Eigen::MatrixXd& q) const {
    const Eigen::Index last = inst_.n_suppliers() - 1;
    for (Eigen::Index l = 0; l < q.cols(); ++l) {
      if (q(last, l) < 0.0 || q(last, l) > upper_(last, l)) return std::nullopt;
    }
    for (Eigen::Index n = 0; n < q.rows(); ++n) {
      if (q.row(n).dot(k_) > inst_.suppliers[static_cast<std::size_t>(n)].capacity * (1.0 + 1e-12)) {
        return std::nullopt;
      }
    }
    if (inst_.emissions_capped() &&
        instance_emissions(inst_, market::AllocationMatrix(q)) > inst_.emissions_cap * (1.0 + 1e-12)) {
      return std::nullopt;
    }
    try {
      return utility(detail::profits_of(inst_, q), inst_.fairness);
    } catch (const DomainError&) {
      return std::nullopt;
    }
  }

  Eigen::MatrixXd point(const std::vector<double>& lo, const std::vector<double>& step,
                        const std::vector<long>& counts, long index) const {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(inst_.n_suppliers(), inst_.n_operators());
    for (std::size_t dim = free_.size(); dim-- > 0;) {
      const long i = index % counts[dim];
      index /= counts[dim];
      q(free_[dim].first, free_[dim].second) = lo[dim] + static_cast<double>(i) * step[dim];
    }
    const Eigen::Index last = inst_.n_suppliers() - 1;
    for (Eigen::Index l = 0; l < q.cols(); ++l) {
      q(last, l) = d_[l] - q.col(l).head(last).sum();
    }
    return q;
  }

  Best run(const std::vector<double>& lo, const std::vector<double>& step, const std::vector<long>& counts,
           long& evaluations) const {
    long total = 1;
    for (long c : counts) total *= c;
    evaluations += total;
    const long workers = std::clamp<long>(std::thread::hardware_concurrency(), 1, 16);
    const long chunk = (total + workers - 1) / workers;
    std::vector<Best> partial(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (long w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        Best b;
        const long end = std::min(total, (w + 1) * chunk);
        for (long i = w * chunk; i < end; ++i) {
          if (auto v = value(point(lo, step, counts, i)); v && *v > b.value) {
            b.value = *v;
            b.index = i;
          }
        }
        partial[static_cast<std::size_t>(w)] = b;
      });
    }
    for (auto& t : pool) t.join();
    Best best;
    for (const auto& b : partial) {
      if (b.index >= 0 && b.value > best.value) best = b;
    }
    return best;
  }

  const Eigen::MatrixXd& upper() const { return upper_; }

 private:
  const ProblemInstance& inst_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> free_;
  Eigen::VectorXd k_;
  Eigen::VectorXd d_;
  Eigen::MatrixXd upper_;
};

}  // namespace

Solution brute_force_oracle(const ProblemInstance& inst, int grid_points) {
  inst.validate();
  const auto dims = (inst.n_suppliers() - 1) * inst.n_operators();
  if (dims > kOracleMaxDims) {
    std::ostringstream msg;
    msg << "brute_force_oracle: " << dims << " free dimensions exceed the limit of " << kOracleMaxDims;
    throw OracleScaleError(msg.str());
  }
  if (grid_points < 2 || grid_points > kOracleMaxGridPoints) {
    throw OracleScaleError("brute_force_oracle: grid_points must be in [2, 200]");
  }
  if (std::pow(static_cast<double>(grid_points), static_cast<double>(dims)) > kMaxEvaluations) {
    std::ostringstream msg;
    msg << "brute_force_oracle: " << grid_points << "^" << dims << " grid points exceed "
        << kMaxEvaluations << " evaluations";
    throw OracleScaleError(msg.str());
  }
  precheck(inst);

  std::vector<std::pair<Eigen::Index, Eigen::Index>> free;
  for (Eigen::Index n = 0; n + 1 < inst.n_suppliers(); ++n) {
    for (Eigen::Index l = 0; l < inst.n_operators(); ++l) free.emplace_back(n, l);
  }
  const GridSearch search(inst, free);
  const auto nd = free.size();

  std::vector<double> lo(nd, 0.0);
  std::vector<double> coarse(nd);
  std::vector<long> counts(nd, grid_points);
  for (std::size_t i = 0; i < nd; ++i) {
    coarse[i] = search.upper()(free[i].first, free[i].second) / (grid_points - 1);
  }
  long evaluations = 0;
  const Best first = search.run(lo, coarse, counts, evaluations);
  if (first.index < 0) {
    throw InfeasibleInstance("brute_force_oracle: no feasible grid point; increase grid_points",
                             "grid-resolution");
  }
  Eigen::MatrixXd incumbent = search.point(lo, coarse, counts, first.index);

  // One 10x finer pass over +-1 coarse step around the incumbent.
  constexpr int kFinePoints = 21;
  std::vector<double> fine(nd);
  for (std::size_t i = 0; i < nd; ++i) {
    const double centre = incumbent(free[i].first, free[i].second);
    const double hi = search.upper()(free[i].first, free[i].second);
    fine[i] = coarse[i] / 10.0;
    lo[i] = std::max(0.0, centre - coarse[i]);
    counts[i] = std::min<long>(kFinePoints, static_cast<long>(std::floor((hi - lo[i]) / fine[i] + 1e-9)) + 1);
  }
  const Best refined = nd > 0 ? search.run(lo, fine, counts, evaluations) : Best{};
  if (refined.index >= 0 && refined.value > first.value) {
    incumbent = search.point(lo, fine, counts, refined.index);
  }

  Diagnostics diag;
  diag.method = "oracle";
  diag.evaluations = evaluations;
  diag.converged = true;
  Solution sol = evaluate(inst, market::AllocationMatrix(incumbent), DualState::zeros(inst), diag);

  // First-order estimate of the utility lost to the fine grid spacing.
  DualState unit = DualState::zeros(inst);
  unit.theta.setOnes();
  const Eigen::MatrixXd g = lagrangian_gradient(inst, sol.allocation, unit);
  const Eigen::Index last = inst.n_suppliers() - 1;
  double bound = 0.0;
  for (std::size_t i = 0; i < nd; ++i) {
    const auto [n, l] = free[i];
    bound += (std::abs(g(n, l)) + std::abs(g(last, l))) * fine[i];
  }
  sol.diagnostics.resolution_bound = 2.0 * bound;
  return sol;
}

}  // namespace sgdrm::drm
