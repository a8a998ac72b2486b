// Copyright 2026 The QMapLab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QMAPLAB_QMAP_QMAP_TENSOR_HPP_
#define QMAPLAB_QMAP_QMAP_TENSOR_HPP_

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "qmaplab/env/level.hpp"
#include "qmaplab/env/scroll_world.hpp"

namespace qmaplab {

/// Goal-conditioned values Q(s, a, g) for one state: one height x width plane
/// per action. Raw values may leave [0, 1]; consumers clip.
class QMapTensor {
 public:
  QMapTensor() = default;
  QMapTensor(int height, int width, float fill = 0.0f)
      : height_(height),
        width_(width),
        values_(static_cast<std::size_t>(height) * width * kNumActions, fill) {}

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return values_.size(); }
  std::size_t plane_size() const {
    return static_cast<std::size_t>(height_) * width_;
  }

  float& at(int y, int x, int a) { return values_[offset(y, x, a)]; }
  float at(int y, int x, int a) const { return values_[offset(y, x, a)]; }
  float at(QCell g, Action a) const { return at(g.y, g.x, code(a)); }

  std::span<float> plane(int a) {
    return {values_.data() + static_cast<std::size_t>(a) * plane_size(),
            plane_size()};
  }
  std::span<const float> plane(int a) const {
    return {values_.data() + static_cast<std::size_t>(a) * plane_size(),
            plane_size()};
  }
  std::span<float> data() { return values_; }
  std::span<const float> data() const { return values_; }

  /// clip(max_a Q(s, a, g), 0, 1).
  float clipped_max(QCell g) const {
    float best = at(g.y, g.x, 0);
    for (int a = 1; a < kNumActions; ++a) best = std::max(best, at(g.y, g.x, a));
    return std::clamp(best, 0.0f, 1.0f);
  }

  friend bool operator==(const QMapTensor&, const QMapTensor&) = default;

 private:
  std::size_t offset(int y, int x, int a) const {
    return (static_cast<std::size_t>(a) * height_ + y) * width_ + x;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<float> values_;  // [action][y][x]
};

}  // namespace qmaplab

#endif  // QMAPLAB_QMAP_QMAP_TENSOR_HPP_
