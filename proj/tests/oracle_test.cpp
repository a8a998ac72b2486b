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

#include "support.hpp"

namespace qmaplab {
namespace {

using testing::level_named;

constexpr double kGamma = 0.9;

TEST(OracleDistances, ZeroAtTheGoal) {
  const ScrollWorld world(level_named("open_room"));
  const DistanceField f = oracle_distances(world, world.level().start);
  EXPECT_EQ(f.at(world.initial_dyn()), 0);
}

TEST(OracleDistances, DiagonalJumpsInAThreeByThree) {
  const ScrollWorld world(load_level("mode=flat cap=10\n...\n...\nS..\n"));
  const DistanceField f = oracle_distances(world, {2, 0});
  EXPECT_EQ(f.at(world.initial_dyn()), 2);
  // Flat mode has no downward move.
  const DistanceField back = oracle_distances(world, {0, 2});
  EXPECT_EQ(back.at({2, 0, 0, 0}), kUnreachable);
}

TEST(OracleDistances, SealedCellIsUnreachable) {
  const ScrollWorld world(level_named("pocket_room"));
  EXPECT_EQ(oracle_distances(world, {12, 8}).at(world.initial_dyn()), kUnreachable);
  EXPECT_EQ(oracle_distances(world, {6, 4}).at(world.initial_dyn()), kUnreachable);
  EXPECT_NE(oracle_distances(world, {1, 1}).at(world.initial_dyn()), kUnreachable);
}

TEST(OracleDistances, RejectsWallAndOutOfBoundsGoals) {
  const ScrollWorld world(level_named("open_room"));
  EXPECT_THROW(oracle_distances(world, {0, 0}), DomainError);
  EXPECT_THROW(oracle_distances(world, {40, 2}), DomainError);
}

TEST(OracleDistances, HazardsCutPaths) {
  const ScrollWorld world(load_level("mode=flat cap=10\n#####\n#SxF#\n#####\n"));
  EXPECT_EQ(oracle_distances(world, {3, 1}).at(world.initial_dyn()), kUnreachable);
}

TEST(GroundTruth, HandComputedCorridorValues) {
  const ScrollWorld world(load_level("mode=flat cap=10\n######\n#.S..#\n######\n"));
  const QMapTensor q = ground_truth_qmap(world, world.reset().first, kGamma);
  const QCell g{3, 1};
  EXPECT_NEAR(q.at(g, Action::kLeft), 0.81, 1e-6);
  EXPECT_NEAR(q.at(g, Action::kRight), 1.0, 1e-6);
  EXPECT_NEAR(q.at(g, Action::kNoop), 0.9, 1e-6);
  EXPECT_NEAR(q.at(g, Action::kJump), 0.9, 1e-6);  // ceiling: a wasted step
  // Wall cells can never be occupied.
  for (int a = 0; a < kNumActions; ++a) EXPECT_EQ(q.at(QCell{0, 0}, action_from_code(a)), 0.0f);
}

// Q(s, a, g) = 1 if a puts the agent on g, else gamma * max_a' Q(s', a', g),
// and 0 after a terminal transition.
void expect_bellman(const ScrollWorld& world) {
  const GroundTruth truth(world, kGamma);
  const StateGraph& graph = truth.graph();
  std::vector<QMapTensor> maps;
  for (std::size_t i = 0; i < graph.size(); ++i) maps.push_back(truth.qmap(i));
  for (std::size_t i = 0; i < graph.size(); ++i) {
    for (int a = 0; a < kNumActions; ++a) {
      const auto& e = graph.edge(i, a);
      const QCell at = world.agent_qmap_cell(graph.state(static_cast<std::size_t>(e.next)));
      for (int y = 0; y < world.grid_height(); ++y) {
        for (int x = 0; x < world.grid_width(); ++x) {
          double want;
          if (e.terminal) {
            want = 0.0;
          } else if (at == QCell{x, y}) {
            want = 1.0;
          } else {
            want = kGamma * maps[static_cast<std::size_t>(e.next)].clipped_max({x, y});
          }
          ASSERT_NEAR(maps[i].at(y, x, a), want, 1e-6)
              << "state " << i << " action " << a << " goal " << x << "," << y;
        }
      }
    }
  }
}

TEST(GroundTruth, BellmanConsistentOnOpenRoom) { expect_bellman(ScrollWorld(level_named("open_room"))); }
TEST(GroundTruth, BellmanConsistentOnPocketRoom) { expect_bellman(ScrollWorld(level_named("pocket_room"))); }
TEST(GroundTruth, BellmanConsistentOnWalledCorridor) {
  expect_bellman(ScrollWorld(level_named("walled_corridor")));
}

TEST(GroundTruth, ValuesAreDiscountedStepCounts) {
  const ScrollWorld world(level_named("walled_corridor"));
  const GroundTruth truth(world, kGamma);
  for (std::size_t i = 0; i < truth.graph().size(); ++i) {
    const QMapTensor q = truth.qmap(i);
    for (float v : q.data()) {
      ASSERT_GE(v, 0.0f);
      ASSERT_LE(v, 1.0f);
      if (v > 0.0f) {
        const double d = 1.0 + std::log(v) / std::log(kGamma);
        ASSERT_NEAR(d, std::round(d), 1e-3);
      }
    }
  }
}

TEST(GroundTruth, SingleStepGoalsReadOne) {
  const ScrollWorld world(level_named("open_room"));
  const GroundTruth truth(world, kGamma);
  for (std::size_t i = 0; i < truth.graph().size(); ++i) {
    const QMapTensor q = truth.qmap(i);
    for (int a = 0; a < kNumActions; ++a) {
      const auto& e = truth.graph().edge(i, a);
      const QCell c = world.agent_qmap_cell(truth.graph().state(static_cast<std::size_t>(e.next)));
      ASSERT_EQ(q.at(c, action_from_code(a)), 1.0f);
    }
  }
}

TEST(GroundTruth, FramesAgreeWithoutScrolling) {
  for (const char* name : {"open_room", "pocket_room", "walled_corridor"}) {
    const ScrollWorld world(level_named(name));
    const GroundTruth a(world, kGamma, GoalFrame::kWorld);
    const GroundTruth b(world, kGamma, GoalFrame::kViewport);
    for (std::size_t i = 0; i < a.graph().size(); i += 7) {
      ASSERT_TRUE(a.qmap(i) == b.qmap(i)) << name;
    }
  }
}

TEST(GroundTruth, WorldFrameFollowsTheScenery) {
  // View 6 wide with a lead margin of 2: walking right scrolls once the agent
  // passes view column 3, so view column 5 is never occupied until the
  // window stops at the level edge, and then only view column 4 is.
  const ScrollWorld world(load_level(
      "mode=flat cap=50 view=6x3\n############\n#S.........#\n############\n"));
  const WorldState st = world.reset().first;
  const QMapTensor w = ground_truth_qmap(world, st, kGamma, GoalFrame::kWorld);
  const QMapTensor v = ground_truth_qmap(world, st, kGamma, GoalFrame::kViewport);
  EXPECT_NEAR(w.at(QCell{5, 1}, Action::kRight), std::pow(kGamma, 3), 1e-6);
  EXPECT_EQ(v.at(QCell{5, 1}, Action::kRight), 0.0f);
  EXPECT_NEAR(w.at(QCell{4, 1}, Action::kRight), std::pow(kGamma, 2), 1e-6);
  EXPECT_NEAR(v.at(QCell{4, 1}, Action::kRight), std::pow(kGamma, 8), 1e-6);
  EXPECT_EQ(w.at(QCell{1, 1}, Action::kNoop), 1.0f);
  EXPECT_EQ(v.at(QCell{1, 1}, Action::kNoop), 1.0f);
}

}  // namespace
}  // namespace qmaplab
