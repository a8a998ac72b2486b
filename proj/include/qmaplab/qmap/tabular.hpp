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

#ifndef QMAPLAB_QMAP_TABULAR_HPP_
#define QMAPLAB_QMAP_TABULAR_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "qmaplab/core/binary_io.hpp"
#include "qmaplab/core/errors.hpp"
#include "qmaplab/qmap/model.hpp"
#include "qmaplab/qmap/targets.hpp"

namespace qmaplab {

/// Exact Q-map table keyed by the dynamics state. Unvisited states read as
/// all zeros. The table is its own target (no frozen copy).
class TabularQMap final : public QMapLearner {
 public:
  TabularQMap(int grid_height, int grid_width, double gamma, double step_size = 1.0,
              bool align_view = true)
      : height_(grid_height), width_(grid_width), gamma_(gamma), step_(step_size),
        align_view_(align_view) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("Q-map gamma must be in (0, 1)");
    if (!(step_size > 0.0 && step_size <= 1.0)) {
      throw ConfigError("tabular step size must be in (0, 1]");
    }
  }

  int grid_height() const override { return height_; }
  int grid_width() const override { return width_; }
  double gamma() const { return gamma_; }
  std::size_t states() const { return table_.size(); }

  QMapTensor forward(const Observation& obs) const override {
    QMapTensor t(height_, width_);
    if (auto it = table_.find(obs.key); it != table_.end()) {
      std::copy(it->second.begin(), it->second.end(), t.data().begin());
    }
    return t;
  }

  TrainResult train_step(std::span<const Transition> batch,
                         std::span<const double> weights) override {
    if (weights.size() != batch.size()) throw ContractError("weights/batch size mismatch");
    const auto targets = compute_targets(batch, *this, gamma_, nullptr, align_view_);
    const std::size_t plane = static_cast<std::size_t>(height_) * width_;
    TrainResult result;
    result.td_errors.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      auto& row = entry(batch[i].obs_before.key);
      float* q = row.data() + static_cast<std::size_t>(code(batch[i].action)) * plane;
      const float rate = static_cast<float>(step_ * weights[i]);
      double sq = 0.0;
      double abs_sum = 0.0;
      for (std::size_t c = 0; c < plane; ++c) {
        const float err = targets[i].values[c] - q[c];
        sq += double(err) * err;
        abs_sum += std::abs(err);
        q[c] = rate == 1.0f ? targets[i].values[c] : q[c] + rate * err;
      }
      result.loss += weights[i] * sq;
      result.td_errors.push_back(abs_sum / static_cast<double>(plane));
    }
    result.loss /= static_cast<double>(batch.size());
    return result;
  }

  void sync_target() override {}

  /// Overwrites the stored map of one state.
  void set(std::uint64_t key, const QMapTensor& t) {
    if (t.height() != height_ || t.width() != width_) throw ConfigError("Q-map shape mismatch");
    auto& row = entry(key);
    std::copy(t.data().begin(), t.data().end(), row.begin());
  }

  // Checkpoint: "QMTB" magic, version, grid dims, gamma, then sparse
  // (state key, float32 map) records.
  void save(std::ostream& out) const override {
    io::write_magic(out, "QMTB", 1);
    io::write_le<std::int32_t>(out, height_);
    io::write_le<std::int32_t>(out, width_);
    io::write_le<double>(out, gamma_);
    io::write_le<std::uint64_t>(out, table_.size());
    std::vector<std::uint64_t> keys;
    keys.reserve(table_.size());
    for (const auto& [k, v] : table_) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (auto k : keys) {
      io::write_le<std::uint64_t>(out, k);
      io::write_floats<float>(out, table_.at(k));
    }
  }

  void load(std::istream& in) override {
    io::expect_magic(in, "QMTB", 1);
    const int h = io::read_le<std::int32_t>(in);
    const int w = io::read_le<std::int32_t>(in);
    if (h != height_ || w != width_) throw IoError("tabular checkpoint grid mismatch");
    gamma_ = io::read_le<double>(in);
    const auto n = io::read_le<std::uint64_t>(in);
    table_.clear();
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto k = io::read_le<std::uint64_t>(in);
      io::read_floats<float>(in, entry(k));
    }
  }

 private:
  std::vector<float>& entry(std::uint64_t key) {
    auto [it, inserted] = table_.try_emplace(key);
    if (inserted) {
      it->second.assign(static_cast<std::size_t>(height_) * width_ * kNumActions, 0.0f);
    }
    return it->second;
  }

  int height_;
  int width_;
  double gamma_;
  double step_;
  bool align_view_;
  std::unordered_map<std::uint64_t, std::vector<float>> table_;
};

}  // namespace qmaplab

#endif  // QMAPLAB_QMAP_TABULAR_HPP_
