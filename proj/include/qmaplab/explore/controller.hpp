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

#ifndef QMAPLAB_EXPLORE_CONTROLLER_HPP_
#define QMAPLAB_EXPLORE_CONTROLLER_HPP_

#include <algorithm>

#include "qmaplab/core/errors.hpp"

namespace qmaplab {

/// Linear interpolation from `start` to `end` over the first `fraction` of
/// the run, constant afterwards.
struct LinearSchedule {
  double start = 0.0;
  double end = 0.0;
  double fraction = 0.75;

  double value(long step, long total_steps) const {
    const double span = fraction * static_cast<double>(total_steps);
    const double progress = span <= 0.0 ? 1.0 : std::min(1.0, static_cast<double>(step) / span);
    return start + (end - start) * progress;
  }
};

struct ControllerConfig {
  LinearSchedule random_action{0.1, 0.05, 0.75};
  /// Probability of a greedy task action; its complement is the scheduled
  /// exploration proportion.
  LinearSchedule greedy{0.0, 0.95, 0.75};
  double p_bias = 0.5;
  double p_goal_initial = 1.0;
  bool adapt_p_goal = true;
  double ema_decay = 0.9998;
  double gain = 0.005;
  double ema_initial = 1.0;
};

/// Holds the exploration probabilities and steers p_goal so that a running
/// average of exploratory steps follows the scheduled proportion.
class ExplorationController {
 public:
  ExplorationController(ControllerConfig config, long total_steps)
      : config_(config),
        total_(total_steps),
        p_goal_(config.p_goal_initial),
        ema_(config.ema_initial) {
    if (total_steps <= 0) throw ConfigError("total_steps must be positive");
    if (config.ema_decay < 0.0 || config.ema_decay >= 1.0) {
      throw ConfigError("ema_decay must be in [0, 1)");
    }
    if (config.gain < 0.0) throw ConfigError("controller gain must be >= 0");
    auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!in_unit(config.p_bias) || !in_unit(config.p_goal_initial) ||
        !in_unit(config.ema_initial)) {
      throw ConfigError("probabilities must lie in [0, 1]");
    }
  }

  const ControllerConfig& config() const { return config_; }
  long total_steps() const { return total_; }

  double p_random(long t) const {
    return std::clamp(config_.random_action.value(t, total_), 0.0, 1.0);
  }
  double eps_scheduled(long t) const {
    return std::clamp(1.0 - config_.greedy.value(t, total_), 0.0, 1.0);
  }
  double p_bias() const { return config_.p_bias; }
  double p_goal() const { return p_goal_; }
  double ema() const { return ema_; }

  /// ema <- lambda ema + (1 - lambda) [exploratory];
  /// p_goal <- clamp(p_goal + eta (eps_scheduled(t) - ema), 0, 1).
  void update(bool exploratory, long t) {
    const double lambda = config_.ema_decay;
    ema_ = lambda * ema_ + (1.0 - lambda) * (exploratory ? 1.0 : 0.0);
    if (config_.adapt_p_goal) {
      p_goal_ = std::clamp(p_goal_ + config_.gain * (eps_scheduled(t) - ema_), 0.0, 1.0);
    }
  }

  void set_p_goal(double p) { p_goal_ = std::clamp(p, 0.0, 1.0); }
  void set_ema(double e) { ema_ = std::clamp(e, 0.0, 1.0); }

 private:
  ControllerConfig config_;
  long total_;
  double p_goal_;
  double ema_;
};

}  // namespace qmaplab

#endif  // QMAPLAB_EXPLORE_CONTROLLER_HPP_
