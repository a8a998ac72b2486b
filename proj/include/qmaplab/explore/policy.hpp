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

#ifndef QMAPLAB_EXPLORE_POLICY_HPP_
#define QMAPLAB_EXPLORE_POLICY_HPP_

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "qmaplab/core/errors.hpp"
#include "qmaplab/core/random.hpp"
#include "qmaplab/dqn/model.hpp"
#include "qmaplab/env/scroll_world.hpp"
#include "qmaplab/explore/controller.hpp"
#include "qmaplab/qmap/model.hpp"
#include "qmaplab/qmap/queries.hpp"

namespace qmaplab {

/// An active exploration goal. The Q-map cell is re-derived from the world
/// anchor every step so scrolling moves or invalidates it.
struct GoalSpec {
  QCell cell;             // at selection time
  CellPos anchor;         // world cell the goal refers to
  float value = 0.0f;     // clipped Q-value that set the budget
  int expected_steps = 0;
  int budget = 0;         // initial T
  int remaining = 0;      // T
};

enum class DecisionSource { kRandom, kDqn, kQMap };

inline const char* source_name(DecisionSource s) {
  switch (s) {
    case DecisionSource::kRandom: return "random";
    case DecisionSource::kDqn: return "dqn";
    case DecisionSource::kQMap: return "qmap";
  }
  return "?";
}

namespace goal_event {
inline constexpr unsigned kNew = 1u << 0;
inline constexpr unsigned kStep = 1u << 1;
inline constexpr unsigned kReached = 1u << 2;
inline constexpr unsigned kOffscreen = 1u << 3;
inline constexpr unsigned kExpired = 1u << 4;
inline constexpr unsigned kBiased = 1u << 5;
}  // namespace goal_event

struct ActionDecision {
  Action action = Action::kNoop;
  DecisionSource source = DecisionSource::kRandom;
  unsigned events = 0;
  std::optional<GoalSpec> goal;  // goal state after this decision

  bool exploratory() const { return source != DecisionSource::kDqn; }
};

enum class GoalStatus { kReached, kOffscreen, kActive };

inline GoalStatus goal_status(const GoalSpec& goal, const ViewFrame& view,
                              std::optional<QCell> agent_cell) {
  const auto projected = view.project(goal.anchor);
  if (!projected) return GoalStatus::kOffscreen;
  if (agent_cell && *agent_cell == *projected) return GoalStatus::kReached;
  return GoalStatus::kActive;
}

/// Goals of G whose greedy Q-map action equals `a`.
inline std::vector<QCell> compatible_goals(std::span<const QCell> goals, Action a,
                                           const QMapTensor& q) {
  std::vector<QCell> out;
  for (const QCell& g : goals) {
    if (greedy_action(q, g) == a) out.push_back(g);
  }
  return out;
}

struct PolicyConfig {
  int goal_steps_min = 15;
  int goal_steps_max = 30;
  /// Extra fraction of the expected time granted to reach a goal.
  double time_supplement = 0.5;
  double qmap_gamma = 0.9;
};

/// Goal-oriented action selection on top of a task learner.
///
/// Random draws from `rng`, in order: one for the random-action test; if it
/// fails and no goal is active, one for the goal test (also drawn when no
/// Q-map is attached); one more for the bias test when goals are available;
/// then whatever uniform choices the branch needs. Given the same inputs and
/// stream, decisions are identical.
class ExplorerPolicy {
 public:
  explicit ExplorerPolicy(PolicyConfig config = {}) : config_(config) {
    value_band(config.qmap_gamma, config.goal_steps_min, config.goal_steps_max);
    if (config.time_supplement < 0.0) throw ConfigError("time supplement must be >= 0");
  }

  const PolicyConfig& config() const { return config_; }
  const std::optional<GoalSpec>& goal() const { return goal_; }
  void set_goal(GoalSpec g) { goal_ = g; }
  void clear_goal() { goal_.reset(); }

  /// Without a Q-map no goal is ever formed; without a task model the greedy
  /// task action is replaced by a uniform random action.
  ActionDecision select_action(const ExplorationController& controller, long t,
                               const QMapModel* qmap, const TaskModel* task,
                               const Observation& obs, const ViewFrame& view,
                               std::optional<QCell> agent_cell, Rng& rng) {
    ActionDecision d;
    if (uniform01(rng) < controller.p_random(t)) {
      d.action = random_action(rng);
      d.source = DecisionSource::kRandom;
      d.goal = goal_;
      return d;
    }

    if (goal_) {
      switch (goal_status(*goal_, view, agent_cell)) {
        case GoalStatus::kReached:
          d.events |= goal_event::kReached;
          goal_.reset();
          break;
        case GoalStatus::kOffscreen:
          d.events |= goal_event::kOffscreen;
          goal_.reset();
          break;
        case GoalStatus::kActive:
          break;
      }
    }

    if (!goal_) {
      const bool draw_goal = uniform01(rng) < controller.p_goal();
      if (qmap && draw_goal) {
        const QMapTensor q = qmap->forward(obs);
        const auto candidates = goals_in_range(q, config_.qmap_gamma,
                                               config_.goal_steps_min,
                                               config_.goal_steps_max);
        if (!candidates.empty()) {
          const bool try_bias = uniform01(rng) < controller.p_bias();
          QCell g;
          float value;
          if (task) {
            d.action = greedy_task_action(*task, obs);
            const auto compatible = compatible_goals(candidates, d.action, q);
            if (try_bias && !compatible.empty()) {
              g = compatible[static_cast<std::size_t>(
                  uniform_int(rng, static_cast<int>(compatible.size())))];
              value = std::clamp(q.at(g, d.action), 0.0f, 1.0f);
              d.events |= goal_event::kBiased;
            } else {
              g = pick(candidates, rng);
              d.action = greedy_action(q, g);
              value = q.clipped_max(g);
            }
          } else {
            g = pick(candidates, rng);
            d.action = greedy_action(q, g);
            value = q.clipped_max(g);
          }
          GoalSpec spec;
          spec.cell = g;
          spec.anchor = view.anchor(g);
          spec.value = value;
          spec.expected_steps = expected_steps(value, config_.qmap_gamma);
          spec.budget = static_cast<int>(
              std::ceil((1.0 + config_.time_supplement) * spec.expected_steps - 1e-9));
          spec.remaining = spec.budget;
          goal_ = spec;
          d.source = DecisionSource::kQMap;
          d.events |= goal_event::kNew;
        } else {
          d.action = random_action(rng);
          d.source = DecisionSource::kRandom;
        }
      } else if (task) {
        d.action = greedy_task_action(*task, obs);
        d.source = DecisionSource::kDqn;
      } else {
        d.action = random_action(rng);
        d.source = DecisionSource::kRandom;
      }
    } else {
      const auto cell = view.project(goal_->anchor);
      d.action = greedy_action(*qmap, obs, *cell);
      d.source = DecisionSource::kQMap;
      d.events |= goal_event::kStep;
      if (--goal_->remaining <= 0) {
        d.events |= goal_event::kExpired;
        goal_.reset();
      }
    }
    d.goal = goal_;
    return d;
  }

 private:
  static Action random_action(Rng& rng) {
    return action_from_code(uniform_int(rng, kNumActions));
  }
  static QCell pick(const std::vector<QCell>& goals, Rng& rng) {
    return goals[static_cast<std::size_t>(uniform_int(rng, static_cast<int>(goals.size())))];
  }

  PolicyConfig config_;
  std::optional<GoalSpec> goal_;
};

}  // namespace qmaplab

#endif  // QMAPLAB_EXPLORE_POLICY_HPP_
