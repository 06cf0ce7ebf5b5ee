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
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

#include "sgdrm/errors.hpp"
#include "sgdrm/spatial.hpp"

namespace sgdrm::spatial {

namespace {

constexpr std::uint64_t kFadeStream = 0x66616465ULL;
constexpr int kMaxResamples = 1000;

struct TrialTally {
  long covered = 0;
  long resampled = 0;
};

bool covered_in_trial(const geometry::OperatorSpec& op, const geometry::PhysicsParams& phys,
                      double transmit_power, const Window& window, std::uint64_t trial_seed,
                      long& resampled) {
  PointPattern bs;
  std::uint64_t seed = trial_seed;
  for (int attempt = 0;; ++attempt) {
    bs = sample_ppp(op.bs_density, window, seed);
    if (!bs.points.empty()) break;
    if (attempt == kMaxResamples) {
      throw NumericalError("empirical_coverage: BS pattern empty after repeated resampling",
                           static_cast<double>(attempt));
    }
    ++resampled;
    seed = derive_seed(trial_seed, static_cast<std::uint64_t>(attempt) + 1);
  }

  const auto& pts = bs.points;
  std::size_t serving = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d2 = pts[i].x * pts[i].x + pts[i].y * pts[i].y;
    if (d2 < best) {
      best = d2;
      serving = i;
    }
  }

  const auto retained = matern_retained(bs, phys.exclusion_distance, seed);
  boost::random::mt19937_64 rng(derive_seed(seed, kFadeStream));
  boost::random::exponential_distribution<double> fade(phys.fading_rate);

  const double half_eta = 0.5 * phys.path_loss_exp;
  const double signal = fade(rng) * std::pow(best, -half_eta);
  double interference = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (j == serving || !retained[j]) continue;
    const double d2 = pts[j].x * pts[j].x + pts[j].y * pts[j].y;
    interference += fade(rng) * std::pow(d2, -half_eta);
  }
  // P_t divides out of the interference term.
  const double sinr = signal / (phys.noise_power / transmit_power + interference);
  return sinr > op.sinr_threshold;
}

}  // namespace

double default_window_half_side(const geometry::OperatorSpec& op,
                                const geometry::PhysicsParams& phys) {
  const double mean_nn = 0.5 / std::sqrt(op.bs_density);
  return std::max(10.0 * mean_nn, 6.0 * phys.exclusion_distance);
}

CoverageEstimate empirical_coverage(const geometry::OperatorSpec& op,
                                    const geometry::PhysicsParams& phys, double transmit_power,
                                    long n_trials, std::uint64_t seed,
                                    const EmpiricalOptions& options) {
  op.validate();
  phys.validate();
  if (!(transmit_power > 0.0) || !std::isfinite(transmit_power)) {
    throw InvalidArgument("empirical_coverage: transmit_power must be > 0");
  }
  if (n_trials < 1) throw InvalidArgument("empirical_coverage: n_trials must be >= 1");

  const double half_side =
      options.window_half_side > 0.0 ? options.window_half_side : default_window_half_side(op, phys);
  const Window window = Window::centered(half_side);

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::min<long>(n_trials, 64)));

  // Each worker owns a contiguous block of trial indices; tallies are integers,
  // so the result does not depend on the thread count.
  std::vector<TrialTally> tallies(threads);
  std::vector<std::exception_ptr> failures(threads);
  auto work = [&](unsigned w) {
    const long begin = n_trials * w / threads;
    const long end = n_trials * (w + 1) / threads;
    try {
      for (long t = begin; t < end; ++t) {
        if (covered_in_trial(op, phys, transmit_power, window,
                             derive_seed(seed, static_cast<std::uint64_t>(t)),
                             tallies[w].resampled)) {
          ++tallies[w].covered;
        }
      }
    } catch (...) {
      failures[w] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  CoverageEstimate est;
  long covered = 0;
  for (const auto& t : tallies) {
    covered += t.covered;
    est.resampled_trials += t.resampled;
  }
  est.n_trials = n_trials;
  est.mean = static_cast<double>(covered) / static_cast<double>(n_trials);
  est.half_width_95 = 1.96 * std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(n_trials));
  return est;
}

}  // namespace sgdrm::spatial
