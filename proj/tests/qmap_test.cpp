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

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "support.hpp"

namespace qmaplab {
namespace {

using testing::FixedQMap;
using testing::keyed_obs;
using testing::level_named;

Transition hand_transition(std::uint64_t before, std::uint64_t after, QCell next,
                           Action a = Action::kRight, bool terminal = false) {
  Transition t;
  t.obs_before = keyed_obs(before);
  t.obs_after = keyed_obs(after);
  t.action = a;
  t.next_cell = next;
  t.terminal = terminal;
  return t;
}

// --- Targets -----------------------------------------------------------------

TEST(Targets, TerminalTransitionsTargetZero) {
  FixedQMap model(2, 3);
  model.put(2, QMapTensor(2, 3, 0.7f));
  const Transition t = hand_transition(1, 2, {1, 0}, Action::kRight, true);
  const auto out = compute_targets(std::span(&t, 1), model, 0.9);
  for (float v : out[0].values) EXPECT_EQ(v, 0.0f);
}

TEST(Targets, ColdStartMarksOnlyTheNextCell) {
  const FixedQMap model(2, 3);
  const Transition t = hand_transition(1, 2, {2, 1});
  const auto out = compute_targets(std::span(&t, 1), model, 0.9);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 3; ++x) EXPECT_EQ(out[0].at(y, x), (x == 2 && y == 1) ? 1.0f : 0.0f);
  }
}

TEST(Targets, BootstrapClipsToTheUnitInterval) {
  FixedQMap model(2, 3);
  QMapTensor next(2, 3);
  next.at(0, 0, 2) = 1.2f;   // clipped to 1
  next.at(0, 1, 4) = -0.5f;  // clipped to 0
  next.at(0, 2, 1) = 0.5f;
  next.at(0, 2, 3) = 0.25f;
  model.put(2, next);
  const Transition t = hand_transition(1, 2, {1, 1});
  const auto out = compute_targets(std::span(&t, 1), model, 0.9);
  EXPECT_EQ(out[0].at(0, 0), 0.9f);
  EXPECT_EQ(out[0].at(0, 1), 0.0f);
  EXPECT_EQ(out[0].at(0, 2), 0.9f * 0.5f);
  EXPECT_EQ(out[0].at(1, 1), 1.0f);
  EXPECT_EQ(out[0].at(1, 0), 0.0f);
}

TEST(Targets, ViewShiftRealignsGoals) {
  // The window moved one cell right: goal x of s is cell x - 1 of s'.
  FixedQMap model(1, 4);
  QMapTensor next(1, 4);
  for (int x = 0; x < 4; ++x) next.at(0, x, 0) = 0.1f * static_cast<float>(x + 1);
  model.put(2, next);
  Transition t = hand_transition(1, 2, {2, 0});
  t.view_shift = {1, 0};
  const auto aligned = compute_targets(std::span(&t, 1), model, 0.5, nullptr, true);
  EXPECT_EQ(aligned[0].values, (std::vector<float>{0.0f, 0.5f * 0.1f, 0.5f * 0.2f, 1.0f}));
  const auto raw = compute_targets(std::span(&t, 1), model, 0.5, nullptr, false);
  EXPECT_EQ(raw[0].values, (std::vector<float>{0.5f * 0.1f, 0.5f * 0.2f, 1.0f, 0.5f * 0.4f}));
}

TEST(Targets, DoubleQSelectsWithOneModelAndEvaluatesWithTheOther) {
  FixedQMap wide_eval(1, 2), wide_pick(1, 2);
  QMapTensor we(1, 2), wp(1, 2);
  we.at(0, 0, 1) = 0.2f;
  we.at(0, 0, 5) = 0.8f;
  wp.at(0, 0, 1) = 0.9f;
  wide_eval.put(2, we);
  wide_pick.put(2, wp);
  const Transition t = hand_transition(1, 2, {1, 0});
  EXPECT_EQ(compute_targets(std::span(&t, 1), wide_eval, 0.5, &wide_pick)[0].at(0, 0), 0.5f * 0.2f);
  EXPECT_EQ(compute_targets(std::span(&t, 1), wide_eval, 0.5)[0].at(0, 0), 0.5f * 0.8f);
}

TEST(Targets, NextCellOutsideTheGridIsAContractError) {
  const FixedQMap model(2, 3);
  const Transition t = hand_transition(1, 2, {3, 0});
  EXPECT_THROW(compute_targets(std::span(&t, 1), model, 0.9), ContractError);
  EXPECT_THROW(compute_targets({}, model, 0.9), ContractError);
}

// --- Tabular learner -------------------------------------------------------------

TEST(TabularQMap, UntrainedStatesReadZero) {
  const TabularQMap q(12, 16, 0.9);
  const QMapTensor t = q.forward(keyed_obs(123));
  for (float v : t.data()) EXPECT_EQ(v, 0.0f);
  EXPECT_EQ(greedy_action(t, {3, 3}), Action::kNoop);
}

TEST(TabularQMap, RejectsBadParameters) {
  EXPECT_THROW(TabularQMap(2, 2, 1.0), ConfigError);
  EXPECT_THROW(TabularQMap(2, 2, 0.9, 0.0), ConfigError);
}

void expect_fixed_point_matches_oracle(const char* name, double gamma) {
  const ScrollWorld world(level_named(name));
  TabularQMap q(world.grid_height(), world.grid_width(), gamma);
  const auto all = testing::exhaustive_transitions(world);
  ASSERT_GT(testing::train_to_fixed_point(q, all), 0) << name;
  const GroundTruth truth(world, gamma);
  const auto gap = testing::oracle_gap(q, world, truth);
  EXPECT_LE(gap.max_error, 1e-6) << name;
  EXPECT_TRUE(gap.unreachable_exact) << name;
}

TEST(TabularQMap, FixedPointIsTheOracleOnOpenRoom) { expect_fixed_point_matches_oracle("open_room", 0.9); }
TEST(TabularQMap, FixedPointIsTheOracleOnPocketRoom) { expect_fixed_point_matches_oracle("pocket_room", 0.9); }
TEST(TabularQMap, FixedPointIsTheOracleOnWalledCorridor) {
  expect_fixed_point_matches_oracle("walled_corridor", 0.95);
}
TEST(TabularQMap, FixedPointIsTheWorldFrameOracleWhileScrolling) {
  expect_fixed_point_matches_oracle("corridor", 0.9);
}

TEST(TabularQMap, GreedyActionHeadsForTheGoal) {
  const ScrollWorld world(load_level("mode=flat cap=50\n.....\n.....\n.....\n.....\nS....\n"));
  TabularQMap q(5, 5, 0.9);
  ASSERT_GT(testing::train_to_fixed_point(q, testing::exhaustive_transitions(world)), 0);
  const QMapTensor t = q.forward(world.reset().first.obs);
  EXPECT_EQ(greedy_action(t, {4, 4}), Action::kRight);
  EXPECT_EQ(greedy_action(t, {4, 0}), Action::kJumpRight);
  EXPECT_EQ(greedy_action(t, {0, 0}), Action::kJump);
  EXPECT_EQ(greedy_action(t, {0, 4}), Action::kNoop);  // ties with Left; lowest code wins
}

TEST(TabularQMap, CheckpointRoundTrip) {
  const ScrollWorld world(level_named("open_room"));
  TabularQMap a(world.grid_height(), world.grid_width(), 0.9);
  testing::train_to_fixed_point(a, testing::exhaustive_transitions(world));
  std::stringstream buf;
  a.save(buf);
  TabularQMap b(world.grid_height(), world.grid_width(), 0.5);
  b.load(buf);
  EXPECT_EQ(b.gamma(), 0.9);
  EXPECT_EQ(a.states(), b.states());
  const auto st = world.reset().first;
  EXPECT_TRUE(a.forward(st.obs) == b.forward(st.obs));
  TabularQMap wrong(3, 3, 0.9);
  std::stringstream again;
  a.save(again);
  EXPECT_THROW(wrong.load(again), IoError);
}

// --- Queries -------------------------------------------------------------------------

TEST(Queries, ValueBandForFifteenToThirtySteps) {
  const ValueBand band = value_band(0.9, 15, 30);
  EXPECT_DOUBLE_EQ(band.low, 0.047101286972462485);
  EXPECT_DOUBLE_EQ(band.high, 0.2287679245496101);
  EXPECT_THROW(value_band(0.9, 0, 3), DomainError);
  EXPECT_THROW(value_band(0.9, 5, 3), DomainError);
}

TEST(Queries, ExpectedStepsInvertsTheDiscount) {
  for (double gamma : {0.9, 0.95}) {
    for (int d = 1; d <= 50; ++d) {
      const float q = static_cast<float>(std::pow(gamma, d - 1));
      EXPECT_EQ(expected_steps(q, gamma), d) << gamma << " " << d;
    }
  }
  EXPECT_EQ(expected_steps(1.0, 0.9), 1);
  EXPECT_EQ(expected_steps(0.9, 0.9), 2);
  EXPECT_THROW(expected_steps(0.0, 0.9), DomainError);
  EXPECT_THROW(expected_steps(-0.1, 0.9), DomainError);
  EXPECT_THROW(expected_steps(1.5, 0.9), DomainError);
}

// Goals selected from the exact map are exactly the cells whose best
// first-action distance lies in [15, 30], checked against per-goal
// breadth-first distances.
TEST(Queries, GoalsInRangeMatchOracleDistances) {
  const ScrollWorld world(level_named("walled_corridor"));
  const GroundTruth truth(world, 0.9);
  const StateGraph& graph = truth.graph();
  std::map<std::pair<int, int>, DistanceField> fields;
  for (int y = 0; y < world.grid_height(); ++y) {
    for (int x = 0; x < world.grid_width(); ++x) {
      if (world.level().at(x, y) != CellKind::kWall) {
        fields.emplace(std::pair{x, y}, oracle_distances(world, {x, y}));
      }
    }
  }
  std::size_t checked = 0;
  std::size_t nonempty = 0;
  for (std::size_t i = 0; i < graph.size(); i += 3) {
    std::set<std::pair<int, int>> want;
    for (const auto& [cell, field] : fields) {
      const int d = field.distance[i];
      if (d == kUnreachable) continue;
      const int best = std::max(1, d);
      if (best >= 15 && best <= 30) want.insert(cell);
    }
    std::set<std::pair<int, int>> got;
    for (QCell g : goals_in_range(truth.qmap(i), 0.9, 15, 30)) got.insert({g.x, g.y});
    ASSERT_EQ(got, want) << "state " << i;
    ++checked;
    nonempty += !got.empty();
  }
  EXPECT_GT(checked, 10u);
  EXPECT_GT(nonempty, 0u);
}

// --- Neural learner -------------------------------------------------------------------

TEST(NeuralQMap, OutputShapeAndCheckpoint) {
  const ScrollWorld world(level_named("corridor"));
  Rng rng(3);
  const nn::Shape in{3, world.frame_height(), world.frame_width()};
  NeuralQMap a(NeuralQMapConfig{}, in, world.grid_height(), world.grid_width(), rng);
  const auto st = world.reset().first;
  const QMapTensor t = a.forward(st.obs);
  EXPECT_EQ(t.height(), 12);
  EXPECT_EQ(t.width(), 16);
  EXPECT_TRUE(a.forward_target(st.obs) == t);
  std::stringstream buf;
  a.save(buf);
  Rng other(99);
  NeuralQMap b(NeuralQMapConfig{}, in, world.grid_height(), world.grid_width(), other);
  b.load(buf);
  EXPECT_TRUE(b.forward(st.obs) == t);
}

TEST(NeuralQMap, TrainingOnAFixedBatchReducesTheLoss) {
  const ScrollWorld world(level_named("open_room"));
  Rng rng(5);
  NeuralQMapConfig cfg;
  cfg.learning_rate = 1e-3;
  const nn::Shape in{3, world.frame_height(), world.frame_width()};
  NeuralQMap q(cfg, in, world.grid_height(), world.grid_width(), rng);
  std::vector<Transition> batch;
  WorldState st = world.reset().first;
  for (int i = 0; i < 16; ++i) {
    const auto r = world.step(st, action_from_code(uniform_int(rng, kNumActions)));
    batch.push_back(r.transition);
    st = r.state;
  }
  const std::vector<double> ones(batch.size(), 1.0);
  const double first = q.train_step(batch, ones).loss;
  double last = first;
  for (int i = 0; i < 60; ++i) last = q.train_step(batch, ones).loss;
  EXPECT_LT(last, 0.5 * first);
}

TEST(NeuralQMap, RejectsObservationsOfTheWrongShape) {
  Rng rng(1);
  NeuralQMap q(NeuralQMapConfig{}, {3, 12, 16}, 12, 16, rng);
  const ScrollWorld small(level_named("open_room"));
  EXPECT_THROW(q.forward(small.reset().first.obs), ConfigError);
}

}  // namespace
}  // namespace qmaplab
