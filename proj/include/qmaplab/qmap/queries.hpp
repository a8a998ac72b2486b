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

#ifndef QMAPLAB_QMAP_QUERIES_HPP_
#define QMAPLAB_QMAP_QUERIES_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "qmaplab/core/errors.hpp"
#include "qmaplab/qmap/model.hpp"
#include "qmaplab/qmap/qmap_tensor.hpp"

namespace qmaplab {

/// argmax_a Q(s, a, goal); ties go to the lowest action code.
inline Action greedy_action(const QMapTensor& q, QCell goal) {
  int best = 0;
  for (int a = 1; a < kNumActions; ++a) {
    if (q.at(goal.y, goal.x, a) > q.at(goal.y, goal.x, best)) best = a;
  }
  return action_from_code(best);
}

inline Action greedy_action(const QMapModel& model, const Observation& obs,
                            QCell goal) {
  return greedy_action(model.forward(obs), goal);
}

/// Value band [gamma^(max-1), gamma^(min-1)] for goals expected to take
/// between `steps_min` and `steps_max` steps.
struct ValueBand {
  double low = 0.0;
  double high = 1.0;
};

inline ValueBand value_band(double gamma, int steps_min, int steps_max) {
  if (steps_min < 1 || steps_max < steps_min) {
    throw DomainError("goal step range must satisfy 1 <= min <= max");
  }
  return {std::pow(gamma, steps_max - 1), std::pow(gamma, steps_min - 1)};
}

/// Goal cells whose clipped best value lies in the band for the step range,
/// in row-major order. The band edges are widened by a relative 1e-5 so that
/// values produced by repeated float multiplication land on their level.
inline std::vector<QCell> goals_in_range(const QMapTensor& q, double gamma,
                                         int steps_min, int steps_max) {
  constexpr double kRelTol = 1e-5;
  const ValueBand band = value_band(gamma, steps_min, steps_max);
  const double low = band.low * (1.0 - kRelTol);
  const double high = band.high * (1.0 + kRelTol);
  std::vector<QCell> goals;
  for (int y = 0; y < q.height(); ++y) {
    for (int x = 0; x < q.width(); ++x) {
      const double v = q.clipped_max({x, y});
      if (v > 0.0 && v >= low && v <= high) goals.push_back({x, y});
    }
  }
  return goals;
}

/// Inverts q = gamma^(T-1): round(1 + ln q / ln gamma), at least 1.
inline int expected_steps(double q, double gamma) {
  if (!(q > 0.0) || q > 1.0) throw DomainError("expected_steps needs 0 < q <= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must be in (0, 1)");
  const double steps = std::round(1.0 + std::log(q) / std::log(gamma));
  return std::max(1, static_cast<int>(steps));
}

}  // namespace qmaplab

#endif  // QMAPLAB_QMAP_QUERIES_HPP_
