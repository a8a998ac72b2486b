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

#ifndef QMAPLAB_DQN_TABULAR_HPP_
#define QMAPLAB_DQN_TABULAR_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "qmaplab/core/binary_io.hpp"
#include "qmaplab/core/errors.hpp"
#include "qmaplab/dqn/model.hpp"

namespace qmaplab {

/// Q-table over the full task state (dynamics and consumed coins). Acts as
/// its own target.
class TabularDqn final : public TaskLearner {
 public:
  TabularDqn(double gamma, double step_size = 0.5, bool huber = false)
      : gamma_(gamma), step_(step_size), huber_(huber) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("task gamma must be in (0, 1)");
    if (!(step_size > 0.0 && step_size <= 1.0)) {
      throw ConfigError("tabular step size must be in (0, 1]");
    }
  }

  std::size_t states() const { return table_.size(); }

  QValues forward(const Observation& obs) const override {
    if (auto it = table_.find(obs.task_key); it != table_.end()) return it->second;
    return QValues{};
  }

  void set(std::uint64_t task_key, const QValues& q) { table_[task_key] = q; }

  TrainResult train_step(std::span<const Transition> batch,
                         std::span<const double> weights) override {
    if (weights.size() != batch.size()) throw ContractError("weights/batch size mismatch");
    const auto y = dqn_targets(batch, *this, *this, gamma_);
    TrainResult result;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      float& q = table_[batch[i].obs_before.task_key][static_cast<std::size_t>(code(batch[i].action))];
      const double delta = y[i] - q;
      const double ad = std::abs(delta);
      result.loss += weights[i] * (huber_ ? (ad <= 1.0 ? 0.5 * ad * ad : ad - 0.5) : ad * ad);
      result.td_errors.push_back(ad);
      q = static_cast<float>(q + step_ * weights[i] * delta);
    }
    result.loss /= static_cast<double>(batch.size());
    return result;
  }

  void sync_target() override {}

  void save(std::ostream& out) const override {
    io::write_magic(out, "QMTD", 1);
    io::write_le<std::uint64_t>(out, table_.size());
    std::vector<std::uint64_t> keys;
    for (const auto& [k, v] : table_) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (auto k : keys) {
      io::write_le<std::uint64_t>(out, k);
      io::write_floats<float>(out, table_.at(k));
    }
  }

  void load(std::istream& in) override {
    io::expect_magic(in, "QMTD", 1);
    const auto n = io::read_le<std::uint64_t>(in);
    table_.clear();
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto k = io::read_le<std::uint64_t>(in);
      io::read_floats<float>(in, table_[k]);
    }
  }

 private:
  double gamma_;
  double step_;
  bool huber_;
  std::unordered_map<std::uint64_t, QValues> table_;
};

}  // namespace qmaplab

#endif  // QMAPLAB_DQN_TABULAR_HPP_
