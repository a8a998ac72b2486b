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

#ifndef QMAPLAB_ENV_ORACLE_HPP_
#define QMAPLAB_ENV_ORACLE_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "qmaplab/core/errors.hpp"
#include "qmaplab/env/scroll_world.hpp"
#include "qmaplab/qmap/qmap_tensor.hpp"

namespace qmaplab {

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

/// Every dynamics state reachable from Start, with its six outgoing edges.
/// Terminal edges (hazard or flag) lead nowhere for the purpose of distances.
class StateGraph {
 public:
  struct Edge {
    int next = -1;
    bool terminal = false;
  };

  explicit StateGraph(const ScrollWorld& world) {
    add(world.initial_dyn());
    for (std::size_t i = 0; i < states_.size(); ++i) {
      const DynState s = states_[i];
      std::array<Edge, kNumActions> out{};
      for (int a = 0; a < kNumActions; ++a) {
        const Motion m = world.advance(s, action_from_code(a));
        out[static_cast<std::size_t>(a)] = {add(m.next), m.terminal()};
      }
      edges_.push_back(out);
    }
  }

  std::size_t size() const { return states_.size(); }
  const DynState& state(std::size_t i) const { return states_[i]; }
  const std::vector<DynState>& states() const { return states_; }
  const Edge& edge(std::size_t i, int a) const {
    return edges_[i][static_cast<std::size_t>(a)];
  }
  std::optional<int> find(const DynState& s) const {
    auto it = index_.find(s.key());
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Reverse breadth-first search. Result[i] is the minimal number of
  /// non-terminal steps from state i to any state satisfying `at_goal`
  /// (0 if state i satisfies it), kUnreachable otherwise. With `allowed`,
  /// paths may only pass through states it accepts.
  std::vector<int> distances(
      const std::function<bool(const DynState&)>& at_goal,
      const std::function<bool(const DynState&)>& allowed = {}) const {
    if (reverse_.empty()) build_reverse();
    std::vector<int> dist(states_.size(), kUnreachable);
    std::deque<int> frontier;
    for (std::size_t i = 0; i < states_.size(); ++i) {
      if (at_goal(states_[i])) {
        dist[i] = 0;
        frontier.push_back(static_cast<int>(i));
      }
    }
    while (!frontier.empty()) {
      const int j = frontier.front();
      frontier.pop_front();
      for (int i : reverse_[static_cast<std::size_t>(j)]) {
        if (dist[static_cast<std::size_t>(i)] == kUnreachable &&
            (!allowed || allowed(states_[static_cast<std::size_t>(i)]))) {
          dist[static_cast<std::size_t>(i)] = dist[static_cast<std::size_t>(j)] + 1;
          frontier.push_back(i);
        }
      }
    }
    return dist;
  }

 private:
  int add(const DynState& s) {
    auto [it, inserted] = index_.try_emplace(s.key(), static_cast<int>(states_.size()));
    if (inserted) states_.push_back(s);
    return it->second;
  }

  void build_reverse() const {
    reverse_.assign(states_.size(), {});
    for (std::size_t i = 0; i < states_.size(); ++i) {
      for (const Edge& e : edges_[i]) {
        if (!e.terminal) reverse_[static_cast<std::size_t>(e.next)].push_back(static_cast<int>(i));
      }
    }
  }

  std::vector<DynState> states_;
  std::vector<std::array<Edge, kNumActions>> edges_;
  std::unordered_map<std::uint64_t, int> index_;
  mutable std::vector<std::vector<int>> reverse_;
};

/// Minimal step counts to occupy a world cell.
struct DistanceField {
  StateGraph graph;
  std::vector<int> distance;

  int at(const DynState& s) const {
    const auto i = graph.find(s);
    return i ? distance[static_cast<std::size_t>(*i)] : kUnreachable;
  }
};

inline DistanceField oracle_distances(const ScrollWorld& world, CellPos goal) {
  const Level& level = world.level();
  if (!level.in_bounds(goal.col, goal.row)) {
    throw DomainError("oracle goal outside the level");
  }
  if (level.at(goal) == CellKind::kWall) {
    throw DomainError("oracle goal is a wall cell");
  }
  DistanceField field{StateGraph(world), {}};
  field.distance = field.graph.distances(
      [goal](const DynState& s) { return s.pos() == goal; });
  return field;
}

/// What a goal cell refers to. kWorld: the piece of the world shown at the
/// cell in the queried state, reachable only along paths that keep it in
/// view. kViewport: the screen position itself, whatever it shows later.
enum class GoalFrame { kWorld, kViewport };

/// Exact Q-maps: Q(s, a, g) = gamma^(d-1), with d the minimal number of
/// steps to put the agent on g when the first action is a, and 0 where g
/// cannot be reached without passing a terminal transition. Distance fields
/// are computed on first use and cached.
class GroundTruth {
 public:
  GroundTruth(const ScrollWorld& world, double gamma,
              GoalFrame frame = GoalFrame::kWorld)
      : world_(world), graph_(world), gamma_(gamma), frame_(frame) {}

  const StateGraph& graph() const { return graph_; }
  GoalFrame frame() const { return frame_; }

  /// d(s, a, g), kUnreachable when the goal is unreachable.
  int first_action_distance(std::size_t state, int a, QCell g) const {
    const auto& e = graph_.edge(state, a);
    if (e.terminal) return kUnreachable;
    const int rest = distances_to(state, g)[static_cast<std::size_t>(e.next)];
    return rest == kUnreachable ? kUnreachable : rest + 1;
  }

  QMapTensor qmap(std::size_t state) const {
    QMapTensor t(world_.grid_height(), world_.grid_width());
    for (int y = 0; y < t.height(); ++y) {
      for (int x = 0; x < t.width(); ++x) {
        for (int a = 0; a < kNumActions; ++a) {
          const int d = first_action_distance(state, a, {x, y});
          t.at(y, x, a) = d == kUnreachable
                              ? 0.0f
                              : static_cast<float>(std::pow(gamma_, d - 1));
        }
      }
    }
    return t;
  }

  QMapTensor qmap(const DynState& s) const {
    const auto i = graph_.find(s);
    if (!i) throw DomainError("state not reachable from start");
    return qmap(static_cast<std::size_t>(*i));
  }

 private:
  const std::vector<int>& distances_to(std::size_t state, QCell g) const {
    const int ppc = world_.config().px_per_cell;
    const int rho = world_.config().rho;
    std::uint64_t key;
    std::function<bool(const DynState&)> at_goal, allowed;
    if (frame_ == GoalFrame::kViewport) {
      key = static_cast<std::uint64_t>(g.y) * world_.grid_width() + g.x;
      at_goal = [this, g](const DynState& s) { return world_.agent_qmap_cell(s) == g; };
    } else {
      // The goal is a rho x rho pixel block fixed in world coordinates.
      const ViewFrame v = world_.view(graph_.state(state));
      const int x0 = v.scroll_col * ppc + g.x * rho;
      const int y0 = v.scroll_row * ppc + g.y * rho;
      key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x0)) << 32) |
            static_cast<std::uint32_t>(y0);
      at_goal = [=](const DynState& s) {
        const int px = s.col * ppc;
        const int py = s.row * ppc;
        return px >= x0 && px < x0 + rho && py >= y0 && py < y0 + rho;
      };
      allowed = [this, x0, y0, ppc](const DynState& s) {
        const ViewFrame u = world_.view(s);
        const int ox = x0 - u.scroll_col * ppc;
        const int oy = y0 - u.scroll_row * ppc;
        return ox >= 0 && oy >= 0 && ox < world_.frame_width() && oy < world_.frame_height();
      };
    }
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      it = cache_.emplace(key, graph_.distances(at_goal, allowed)).first;
    }
    return it->second;
  }

  const ScrollWorld& world_;
  StateGraph graph_;
  double gamma_;
  GoalFrame frame_;
  mutable std::unordered_map<std::uint64_t, std::vector<int>> cache_;
};

inline QMapTensor ground_truth_qmap(const ScrollWorld& world,
                                    const WorldState& state, double gamma,
                                    GoalFrame frame = GoalFrame::kWorld) {
  return GroundTruth(world, gamma, frame).qmap(state.dyn);
}

}  // namespace qmaplab

#endif  // QMAPLAB_ENV_ORACLE_HPP_
