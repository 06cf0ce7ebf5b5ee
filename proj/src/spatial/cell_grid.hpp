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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sgdrm/spatial.hpp"

namespace sgdrm::spatial {

// Uniform bucket grid with cells at least `reach` wide, so every point within
// `reach` of a query lies in the 3x3 block of cells around it.
class CellGrid {
 public:
  CellGrid(std::span<const Point> points, const Window& window, double reach)
      : x0_(window.x_min), y0_(window.y_min) {
    nx_ = std::max<long>(1, static_cast<long>(window.width() / reach));
    ny_ = std::max<long>(1, static_cast<long>(window.height() / reach));
    cw_ = window.width() / static_cast<double>(nx_);
    ch_ = window.height() / static_cast<double>(ny_);

    start_.assign(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
    std::vector<long> cell(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      cell[i] = cell_of(points[i]);
      ++start_[static_cast<std::size_t>(cell[i]) + 1];
    }
    for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
    order_.resize(points.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points.size(); ++i) {
      order_[fill[static_cast<std::size_t>(cell[i])]++] = i;
    }
  }

  template <typename Visit>
  void for_each_neighbour(const Point& p, Visit&& visit) const {
    const long cx = clamp_x(p.x);
    const long cy = clamp_y(p.y);
    for (long gy = std::max(0L, cy - 1); gy <= std::min(ny_ - 1, cy + 1); ++gy) {
      for (long gx = std::max(0L, cx - 1); gx <= std::min(nx_ - 1, cx + 1); ++gx) {
        const auto c = static_cast<std::size_t>(gy * nx_ + gx);
        for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) visit(order_[k]);
      }
    }
  }

 private:
  long clamp_x(double x) const {
    return std::clamp(static_cast<long>(std::floor((x - x0_) / cw_)), 0L, nx_ - 1);
  }
  long clamp_y(double y) const {
    return std::clamp(static_cast<long>(std::floor((y - y0_) / ch_)), 0L, ny_ - 1);
  }
  long cell_of(const Point& p) const { return clamp_y(p.y) * nx_ + clamp_x(p.x); }

  double x0_, y0_, cw_ = 1.0, ch_ = 1.0;
  long nx_ = 1, ny_ = 1;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
};

}  // namespace sgdrm::spatial
