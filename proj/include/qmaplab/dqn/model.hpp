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

#ifndef QMAPLAB_DQN_MODEL_HPP_
#define QMAPLAB_DQN_MODEL_HPP_

#include <array>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "qmaplab/env/scroll_world.hpp"
#include "qmaplab/qmap/model.hpp"

namespace qmaplab {

using QValues = std::array<float, kNumActions>;

/// Anything that scores the six actions for an observation.
class TaskModel {
 public:
  virtual ~TaskModel() = default;
  virtual QValues forward(const Observation& obs) const = 0;
};

class TaskLearner : public TaskModel {
 public:
  virtual TrainResult train_step(std::span<const Transition> batch,
                                 std::span<const double> weights) = 0;
  virtual void sync_target() = 0;
  virtual void save(std::ostream& out) const = 0;
  virtual void load(std::istream& in) = 0;
};

/// argmax with ties to the lowest action code.
inline Action greedy_task_action(const QValues& q) {
  int best = 0;
  for (int a = 1; a < kNumActions; ++a) {
    if (q[static_cast<std::size_t>(a)] > q[static_cast<std::size_t>(best)]) best = a;
  }
  return action_from_code(best);
}

inline Action greedy_task_action(const TaskModel& model, const Observation& obs) {
  return greedy_task_action(model.forward(obs));
}

/// Double Q-learning targets: r for terminal transitions, otherwise
/// r + gamma * Q_target(s', argmax_a Q_online(s', a)).
inline std::vector<double> dqn_targets(std::span<const Transition> batch,
                                       const TaskModel& online,
                                       const TaskModel& target, double gamma) {
  std::vector<double> y;
  y.reserve(batch.size());
  for (const Transition& t : batch) {
    double v = t.reward;
    if (!t.terminal) {
      const Action pick = greedy_task_action(online, t.obs_after);
      v += gamma * target.forward(t.obs_after)[static_cast<std::size_t>(code(pick))];
    }
    y.push_back(v);
  }
  return y;
}

}  // namespace qmaplab

#endif  // QMAPLAB_DQN_MODEL_HPP_
