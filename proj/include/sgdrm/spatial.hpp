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

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "sgdrm/geometry.hpp"

namespace sgdrm::spatial {

/// Generator used for every random draw in this module; recorded in run metadata.
inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64 (boost.random), per-trial seeds from splitmix64(seed, trial)";

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Window {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  static Window centered(double half_side) { return {-half_side, -half_side, half_side, half_side}; }
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool contains(const Point& p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
};

struct PointPattern {
  std::vector<Point> points;
  Window window;
  std::uint64_t seed = 0;
};

struct CoverageEstimate {
  double mean = 0.0;
  double half_width_95 = 0.0;
  long n_trials = 0;
  long resampled_trials = 0;  // trials redrawn because the BS pattern was empty
};

/// Stream seed for sub-experiment `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Homogeneous PPP on `window`: Poisson(density * area) points, i.i.d. uniform.
PointPattern sample_ppp(double density, const Window& window, std::uint64_t seed);

/// Matern type-II marks: true where the point survives (no other point
/// within `exclusion_distance` carries a lower mark).
std::vector<bool> matern_retained(const PointPattern& pattern, double exclusion_distance,
                                  std::uint64_t seed);

/// Matern type-II thinning of `pattern`.
PointPattern matern_thin(const PointPattern& pattern, double exclusion_distance,
                         std::uint64_t seed);

struct EmpiricalOptions {
  /// Half side of the square simulation window; <= 0 selects
  /// max(10 * mean nearest-neighbour distance, 6 * exclusion distance).
  double window_half_side = 0.0;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

double default_window_half_side(const geometry::OperatorSpec& op,
                                const geometry::PhysicsParams& phys);

/// Monte Carlo estimate of P[SINR > T] for a user at the window centre.
CoverageEstimate empirical_coverage(const geometry::OperatorSpec& op,
                                    const geometry::PhysicsParams& phys, double transmit_power,
                                    long n_trials, std::uint64_t seed,
                                    const EmpiricalOptions& options = {});

/// Writes "x,y,retained" rows (retained in {0,1}).
void write_pattern_csv(const std::filesystem::path& path, const PointPattern& pattern,
                       const std::vector<bool>& retained);

}  // namespace sgdrm::spatial
