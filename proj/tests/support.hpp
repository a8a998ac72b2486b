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

#ifndef QMAPLAB_TESTS_SUPPORT_HPP_
#define QMAPLAB_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "qmaplab.hpp"

namespace qmaplab::testing {

inline std::filesystem::path levels_dir() { return QMAPLAB_LEVELS_DIR; }

inline Level level_named(const std::string& name) {
  return load_level_file(levels_dir() / (name + ".txt"));
}

/// Every (state, action) transition reachable from Start, one per edge of
/// the state graph, each taken from a fresh state (step count 0).
inline std::vector<Transition> exhaustive_transitions(const ScrollWorld& world) {
  const StateGraph graph(world);
  std::vector<Transition> out;
  out.reserve(graph.size() * kNumActions);
  for (const DynState& s : graph.states()) {
    const WorldState st = world.make_state(s);
    for (int a = 0; a < kNumActions; ++a) {
      out.push_back(world.step(st, action_from_code(a)).transition);
    }
  }
  return out;
}

/// Largest |Q - oracle| over every reachable state, action and goal, plus
/// whether every unreachable goal reads exactly 0.
struct OracleGap {
  double max_error = 0.0;
  bool unreachable_exact = true;
};

inline OracleGap oracle_gap(const QMapModel& model, const ScrollWorld& world,
                            const GroundTruth& truth) {
  OracleGap gap;
  const StateGraph& graph = truth.graph();
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const WorldState st = world.make_state(graph.state(i));
    const QMapTensor q = model.forward(st.obs);
    const QMapTensor want = truth.qmap(i);
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double err = std::abs(double(q.data()[k]) - double(want.data()[k]));
      gap.max_error = std::max(gap.max_error, err);
      if (want.data()[k] == 0.0f && q.data()[k] != 0.0f) gap.unreachable_exact = false;
    }
  }
  return gap;
}

/// Replays every transition in fixed batches until a sweep leaves the table
/// unchanged. Returns the number of sweeps, or -1 past `max_sweeps`.
inline int train_to_fixed_point(QMapLearner& learner, const std::vector<Transition>& all,
                                std::size_t batch_size = 32, int max_sweeps = 500) {
  const std::vector<double> ones(batch_size, 1.0);
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double moved = 0.0;
    for (std::size_t i = 0; i < all.size(); i += batch_size) {
      const std::size_t n = std::min(batch_size, all.size() - i);
      const auto r = learner.train_step(std::span(all).subspan(i, n),
                                        std::span(ones).subspan(0, n));
      moved = std::max(moved, r.loss);
    }
    if (moved == 0.0) return sweep;
  }
  return -1;
}

/// A Q-map model that returns a stored tensor per observation key and zeros
/// otherwise.
class FixedQMap final : public QMapModel {
 public:
  FixedQMap(int h, int w) : h_(h), w_(w) {}
  void put(std::uint64_t key, QMapTensor t) { maps_[key] = std::move(t); }
  QMapTensor forward(const Observation& obs) const override {
    auto it = maps_.find(obs.key);
    return it == maps_.end() ? QMapTensor(h_, w_) : it->second;
  }
  int grid_height() const override { return h_; }
  int grid_width() const override { return w_; }

 private:
  int h_, w_;
  std::map<std::uint64_t, QMapTensor> maps_;
};

/// A task model that returns stored action values per task key.
class FixedTask final : public TaskModel {
 public:
  void put(std::uint64_t key, QValues q) { values_[key] = q; }
  QValues forward(const Observation& obs) const override {
    auto it = values_.find(obs.task_key);
    return it == values_.end() ? QValues{} : it->second;
  }

 private:
  std::map<std::uint64_t, QValues> values_;
};

/// An observation carrying only keys, for learners that never read pixels.
inline Observation keyed_obs(std::uint64_t key, std::uint64_t task_key = 0) {
  Observation o;
  o.key = key;
  o.task_key = task_key;
  return o;
}

}  // namespace qmaplab::testing

#endif  // QMAPLAB_TESTS_SUPPORT_HPP_
