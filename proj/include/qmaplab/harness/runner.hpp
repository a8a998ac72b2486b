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

#ifndef QMAPLAB_HARNESS_RUNNER_HPP_
#define QMAPLAB_HARNESS_RUNNER_HPP_

#include <algorithm>
#include <memory>
#include <optional>
#include <vector>

#include "qmaplab/core/random.hpp"
#include "qmaplab/dqn/neural.hpp"
#include "qmaplab/dqn/tabular.hpp"
#include "qmaplab/env/scroll_world.hpp"
#include "qmaplab/explore/controller.hpp"
#include "qmaplab/explore/policy.hpp"
#include "qmaplab/harness/config.hpp"
#include "qmaplab/harness/metrics.hpp"
#include "qmaplab/nn/architecture.hpp"
#include "qmaplab/qmap/neural.hpp"
#include "qmaplab/qmap/tabular.hpp"
#include "qmaplab/replay/prioritized_buffer.hpp"

namespace qmaplab {

inline nn::Architecture architecture_named(const std::string& name) {
  if (name == "paper") return nn::paper_architecture();
  if (name == "desk") return nn::desk_architecture();
  throw ConfigError("unknown architecture '" + name + "'");
}

inline nn::Shape input_shape(const ScrollWorld& world) {
  return {world.config().frame_stack, world.frame_height(), world.frame_width()};
}

inline std::unique_ptr<QMapLearner> make_qmap_learner(const LearnerConfig& c,
                                                      const ScrollWorld& world,
                                                      Rng& init_rng) {
  if (c.backend == Backend::kTabular) {
    return std::make_unique<TabularQMap>(world.grid_height(), world.grid_width(),
                                         c.gamma, c.step_size, c.align_view);
  }
  NeuralQMapConfig nc;
  nc.gamma = c.gamma;
  nc.learning_rate = c.learning_rate;
  nc.double_q = c.double_q;
  nc.align_view = c.align_view;
  nc.arch = architecture_named(c.arch);
  return std::make_unique<NeuralQMap>(nc, input_shape(world), world.grid_height(),
                                      world.grid_width(), init_rng);
}

inline std::unique_ptr<TaskLearner> make_dqn_learner(const LearnerConfig& c,
                                                     const ScrollWorld& world,
                                                     Rng& init_rng) {
  if (c.backend == Backend::kTabular) {
    return std::make_unique<TabularDqn>(c.gamma, c.step_size, c.huber);
  }
  NeuralDqnConfig nc;
  nc.gamma = c.gamma;
  nc.learning_rate = c.learning_rate;
  nc.dueling = c.dueling;
  nc.huber = c.huber;
  nc.arch = architecture_named(c.arch);
  return std::make_unique<NeuralDqn>(nc, input_shape(world), init_rng);
}

/// Controller settings a mode actually runs with. The baseline explores with
/// random actions at the scheduled exploration proportion and never draws
/// goals; the walks never consult a task learner.
inline ControllerConfig effective_controller(const RunConfig& config) {
  ControllerConfig c = config.controller;
  switch (config.mode) {
    case RunMode::kQMapDqn:
      if (config.freeze_p_goal) c.adapt_p_goal = false;
      break;
    case RunMode::kDqnBaseline:
      c.random_action = {1.0 - c.greedy.start, 1.0 - c.greedy.end, c.greedy.fraction};
      c.p_goal_initial = 0.0;
      c.adapt_p_goal = false;
      break;
    case RunMode::kQMapWalk:
      c.p_goal_initial = 1.0;
      c.adapt_p_goal = false;
      break;
    case RunMode::kRandomWalk:
      c.random_action = {1.0, 1.0, c.random_action.fraction};
      c.p_goal_initial = 0.0;
      c.adapt_p_goal = false;
      break;
  }
  return c;
}

struct RunOptions {
  bool record_trace = false;
};

struct RunResult {
  std::vector<MetricsRow> rows;
  VisitationMask mask;
  std::vector<DecisionRecord> trace;
  std::vector<double> episode_returns;  // completed episodes
  long flags = 0;
  long first_flag_step = -1;
  std::unique_ptr<QMapLearner> qmap;
  std::unique_ptr<TaskLearner> dqn;
};

namespace runner_detail {

inline double train_learner(auto& learner, PrioritizedBuffer& buffer, Track track,
                            std::size_t batch_size, double beta, Rng& rng) {
  const SampleBatch batch = buffer.sample(track, batch_size, beta, rng);
  const TrainResult r = learner.train_step(batch.transitions, batch.weights);
  buffer.update_priorities(batch, r.td_errors);
  return r.loss;
}

}  // namespace runner_detail

/// The training loop. Actions are uniform random before `act_starts`;
/// learners train every `train_interval` steps from `learning_starts` on
/// independent batches of their own priority track; targets sync every
/// `sync_period` steps. Deterministic in (config, level).
inline RunResult run_experiment(const RunConfig& config, const Level& level_in,
                                const RunOptions& options = {}) {
  config.validate();
  Level level = level_in;
  if (config.episode_cap > 0) level.episode_cap = config.episode_cap;
  const ScrollWorld world(level, config.env);

  Rng env_rng = make_rng(config.seed, Stream::kEnv);
  Rng policy_rng = make_rng(config.seed, Stream::kPolicy);
  Rng replay_qmap_rng = make_rng(config.seed, Stream::kReplayQMap);
  Rng replay_dqn_rng = make_rng(config.seed, Stream::kReplayDqn);
  Rng init_qmap_rng = make_rng(config.seed, Stream::kInitQMap);
  Rng init_dqn_rng = make_rng(config.seed, Stream::kInitDqn);

  RunResult result;
  if (uses_qmap(config.mode)) result.qmap = make_qmap_learner(config.qmap, world, init_qmap_rng);
  if (uses_dqn(config.mode)) result.dqn = make_dqn_learner(config.dqn, world, init_dqn_rng);
  std::optional<PrioritizedBuffer> buffer;
  if (result.qmap || result.dqn) buffer.emplace(config.replay);

  ExplorationController controller(effective_controller(config), config.total_steps);
  PolicyConfig policy_config = config.policy;
  policy_config.qmap_gamma = config.qmap.gamma;
  ExplorerPolicy policy(policy_config);

  result.mask = VisitationMask(level.width, level.height);
  WorldState state = world.reset(env_rng()).first;
  result.mask.visit(state.position());

  long episode = 0;
  double episode_return = 0.0;
  double qmap_loss = 0.0;
  double dqn_loss = 0.0;
  if (options.record_trace) result.trace.reserve(static_cast<std::size_t>(config.total_steps));

  for (long t = 0; t < config.total_steps; ++t) {
    ActionDecision d;
    if (config.mode == RunMode::kRandomWalk || t < config.act_starts) {
      d.action = action_from_code(uniform_int(policy_rng, kNumActions));
      d.source = DecisionSource::kRandom;
    } else {
      const ViewFrame view = world.view(state.dyn);
      d = policy.select_action(controller, t, result.qmap.get(), result.dqn.get(),
                               state.obs, view, world.agent_qmap_cell(state), policy_rng);
    }
    controller.update(d.exploratory(), t);

    if (options.record_trace) {
      DecisionRecord rec;
      rec.step = t + 1;
      rec.action = d.action;
      rec.source = d.source;
      rec.events = d.events;
      if (d.goal) {
        rec.goal_x = d.goal->cell.x;
        rec.goal_y = d.goal->cell.y;
        rec.budget = d.goal->remaining;
      }
      rec.p_goal = controller.p_goal();
      rec.ema = controller.ema();
      rec.eps_scheduled = controller.eps_scheduled(t);
      result.trace.push_back(rec);
    }

    StepResult r = world.step(state, d.action);
    const Transition& tr = r.transition;
    episode_return += tr.reward;
    result.mask.visit(tr.world_pos_after);
    const bool ended = tr.ends_episode();
    const bool flag = tr.reached_flag;
    if (buffer) buffer->insert(tr);

    const long step = t + 1;
    if (buffer && step >= config.learning_starts && step % config.train_interval == 0 &&
        buffer->size() >= config.batch_size) {
      const double progress =
          std::min(1.0, static_cast<double>(t) / static_cast<double>(config.total_steps));
      const double beta = config.beta_start + (config.beta_end - config.beta_start) * progress;
      if (result.qmap) {
        qmap_loss = runner_detail::train_learner(*result.qmap, *buffer, Track::kQMap,
                                                 config.batch_size, beta, replay_qmap_rng);
      }
      if (result.dqn) {
        dqn_loss = runner_detail::train_learner(*result.dqn, *buffer, Track::kDqn,
                                                config.batch_size, beta, replay_dqn_rng);
      }
    }
    if (step % config.sync_period == 0) {
      if (result.qmap) result.qmap->sync_target();
      if (result.dqn) result.dqn->sync_target();
    }

    if (flag) {
      ++result.flags;
      if (result.first_flag_step < 0) result.first_flag_step = step;
    }
    if (ended || step % config.metrics_interval == 0) {
      result.rows.push_back({step, episode, episode_return, result.flags,
                             result.mask.count(), controller.ema(), controller.p_goal(),
                             qmap_loss, dqn_loss});
    }
    if (ended) {
      result.episode_returns.push_back(episode_return);
      ++episode;
      episode_return = 0.0;
      state = world.reset(env_rng()).first;
      policy.clear_goal();
      result.mask.visit(state.position());
    } else {
      state = std::move(r.state);
    }
  }
  result.mask.set_steps(config.total_steps);
  return result;
}

}  // namespace qmaplab

#endif  // QMAPLAB_HARNESS_RUNNER_HPP_
