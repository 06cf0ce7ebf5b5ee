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
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <cmath>
#include <fstream>
#include <limits>

#include "sgdrm/errors.hpp"
#include "sgdrm/spatial.hpp"
#include "spatial/cell_grid.hpp"

namespace sgdrm::spatial {

namespace {

// Mean counts above this are rejected; the pattern would not fit in memory anyway.
constexpr double kMaxMeanCount = 1e8;
// Stream tags so PPP positions and Matern marks never share a generator state.
constexpr std::uint64_t kMarkStream = 0x6d61726bULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

PointPattern sample_ppp(double density, const Window& window, std::uint64_t seed) {
  if (!std::isfinite(density) || density <= 0.0) {
    throw InvalidArgument("sample_ppp: density must be > 0");
  }
  if (!(window.width() > 0.0) || !(window.height() > 0.0) || !std::isfinite(window.area())) {
    throw InvalidArgument("sample_ppp: window is degenerate");
  }
  const double mean = density * window.area();
  if (!std::isfinite(mean) || mean > kMaxMeanCount) {
    throw InvalidArgument("sample_ppp: density * area overflows the point budget");
  }

  boost::random::mt19937_64 rng(seed);
  PointPattern pattern;
  pattern.window = window;
  pattern.seed = seed;
  const long count = boost::random::poisson_distribution<long, double>(mean)(rng);
  pattern.points.reserve(static_cast<std::size_t>(count));
  boost::random::uniform_01<double> unit;
  for (long i = 0; i < count; ++i) {
    const double x = window.x_min + unit(rng) * window.width();
    const double y = window.y_min + unit(rng) * window.height();
    pattern.points.push_back({x, y});
  }
  return pattern;
}

std::vector<bool> matern_retained(const PointPattern& pattern, double exclusion_distance,
                                  std::uint64_t seed) {
  if (!std::isfinite(exclusion_distance) || exclusion_distance <= 0.0) {
    throw InvalidArgument("matern_thin: exclusion_distance must be > 0");
  }
  const auto& pts = pattern.points;
  boost::random::mt19937_64 rng(derive_seed(seed, kMarkStream));
  boost::random::uniform_01<double> unit;
  std::vector<double> marks(pts.size());
  for (auto& m : marks) m = unit(rng);

  std::vector<bool> retained(pts.size(), true);
  const CellGrid grid(pts, pattern.window, exclusion_distance);
  const double r2 = exclusion_distance * exclusion_distance;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    grid.for_each_neighbour(pts[i], [&](std::size_t j) {
      if (j == i || !retained[i]) return;
      const double dx = pts[i].x - pts[j].x;
      const double dy = pts[i].y - pts[j].y;
      // Equal marks have probability zero; the index breaks the tie anyway.
      if (dx * dx + dy * dy < r2 && (marks[j] < marks[i] || (marks[j] == marks[i] && j < i))) {
        retained[i] = false;
      }
    });
  }
  return retained;
}

PointPattern matern_thin(const PointPattern& pattern, double exclusion_distance,
                         std::uint64_t seed) {
  const auto keep = matern_retained(pattern, exclusion_distance, seed);
  PointPattern out;
  out.window = pattern.window;
  out.seed = seed;
  for (std::size_t i = 0; i < pattern.points.size(); ++i) {
    if (keep[i]) out.points.push_back(pattern.points[i]);
  }
  return out;
}

void write_pattern_csv(const std::filesystem::path& path, const PointPattern& pattern,
                       const std::vector<bool>& retained) {
  if (retained.size() != pattern.points.size()) {
    throw InvalidArgument("write_pattern_csv: retained mask size does not match the pattern");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.precision(std::numeric_limits<double>::max_digits10);
  out << "x,y,retained\n";
  for (std::size_t i = 0; i < retained.size(); ++i) {
    out << pattern.points[i].x << ',' << pattern.points[i].y << ',' << (retained[i] ? 1 : 0) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace sgdrm::spatial
