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

#ifndef QMAPLAB_QMAP_TARGETS_HPP_
#define QMAPLAB_QMAP_TARGETS_HPP_

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "qmaplab/core/errors.hpp"
#include "qmaplab/qmap/model.hpp"

namespace qmaplab {

/// Regression target for the taken-action plane of one transition.
struct TargetMap {
  int height = 0;
  int width = 0;
  std::vector<float> values;  // row-major, in [0, 1]

  float at(int y, int x) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

/// Off-policy Q-map targets for every goal at once:
///   terminal       -> 0 everywhere
///   otherwise      -> gamma * clip(max_a' Q(s')[:, :, a'], 0, 1),
///                     then 1 at the agent's next cell.
/// With `selector`, a' is chosen per cell by the selector and evaluated by
/// `evaluator` (double Q-learning).
///
/// With `align_view`, goal g of s is read at g - view_shift in s', so a goal
/// names the same piece of the world on both sides of a scroll; goals that
/// leave the view get 0. Without scrolling both forms agree.
inline std::vector<TargetMap> compute_targets(
    std::span<const Transition> batch, const QMapModel& evaluator, double gamma,
    const QMapModel* selector = nullptr, bool align_view = true) {
  if (batch.empty()) throw ContractError("compute_targets on an empty batch");
  const int h = evaluator.grid_height();
  const int w = evaluator.grid_width();
  const float g = static_cast<float>(gamma);
  std::vector<TargetMap> out;
  out.reserve(batch.size());
  for (const Transition& t : batch) {
    TargetMap target{h, w, std::vector<float>(static_cast<std::size_t>(h) * w, 0.0f)};
    if (!t.terminal) {
      if (t.next_cell.x < 0 || t.next_cell.y < 0 || t.next_cell.x >= w ||
          t.next_cell.y >= h) {
        throw ContractError("transition next cell outside the Q-map grid");
      }
      const int dx = align_view ? t.view_shift.x : 0;
      const int dy = align_view ? t.view_shift.y : 0;
      const QMapTensor next = evaluator.forward(t.obs_after);
      std::optional<QMapTensor> pick;
      if (selector) pick = selector->forward(t.obs_after);
      for (int y = 0; y < h; ++y) {
        const int ny = y - dy;
        if (ny < 0 || ny >= h) continue;
        for (int x = 0; x < w; ++x) {
          const int nx = x - dx;
          if (nx < 0 || nx >= w) continue;
          float v;
          if (pick) {
            int best = 0;
            for (int a = 1; a < kNumActions; ++a) {
              if (pick->at(ny, nx, a) > pick->at(ny, nx, best)) best = a;
            }
            v = std::clamp(next.at(ny, nx, best), 0.0f, 1.0f);
          } else {
            v = next.clipped_max({nx, ny});
          }
          target.values[static_cast<std::size_t>(y) * w + x] = g * v;
        }
      }
      const int ax = t.next_cell.x + dx;
      const int ay = t.next_cell.y + dy;
      if (ax >= 0 && ay >= 0 && ax < w && ay < h) {
        target.values[static_cast<std::size_t>(ay) * w + ax] = 1.0f;
      }
    }
    out.push_back(std::move(target));
  }
  return out;
}

}  // namespace qmaplab

#endif  // QMAPLAB_QMAP_TARGETS_HPP_
