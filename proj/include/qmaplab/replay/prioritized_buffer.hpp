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

#ifndef QMAPLAB_REPLAY_PRIORITIZED_BUFFER_HPP_
#define QMAPLAB_REPLAY_PRIORITIZED_BUFFER_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qmaplab/core/binary_io.hpp"
#include "qmaplab/core/errors.hpp"
#include "qmaplab/core/random.hpp"
#include "qmaplab/env/scroll_world.hpp"
#include "qmaplab/replay/sum_tree.hpp"

namespace qmaplab {

/// The two learners keep separate priorities over the same transitions.
enum class Track : int { kQMap = 0, kDqn = 1 };

inline constexpr int kNumTracks = 2;

struct ReplayConfig {
  std::size_t capacity = 50'000;
  double alpha = 0.6;
  double priority_floor = 1e-6;
};

struct SampleBatch {
  Track track = Track::kQMap;
  std::vector<Transition> transitions;
  std::vector<std::size_t> indices;
  std::vector<std::uint64_t> serials;  // insertion number, detects eviction
  std::vector<double> weights;         // importance weights, max 1

  std::size_t size() const { return transitions.size(); }
};

/// Ring buffer of transitions with proportional prioritized sampling on two
/// independent priority tracks.
class PrioritizedBuffer {
 public:
  explicit PrioritizedBuffer(ReplayConfig config = {})
      : config_(config),
        trees_{SumTree(std::max<std::size_t>(config.capacity, 1)),
               SumTree(std::max<std::size_t>(config.capacity, 1))} {
    if (config_.capacity == 0) throw ConfigError("replay capacity must be > 0");
    if (config_.alpha < 0.0) throw ConfigError("alpha must be >= 0");
    if (config_.priority_floor <= 0.0) {
      throw ConfigError("priority floor must be > 0");
    }
    storage_.reserve(std::min<std::size_t>(config_.capacity, 1 << 16));
  }

  const ReplayConfig& config() const { return config_; }
  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return config_.capacity; }
  std::uint64_t inserted() const { return next_serial_; }

  const Transition& at(std::size_t index) const { return storage_[index].transition; }
  std::uint64_t serial(std::size_t index) const { return storage_[index].serial; }

  /// Stores a transition, evicting the oldest when full. The new entry gets
  /// the largest priority seen so far on each track.
  std::size_t insert(Transition transition) {
    std::size_t index;
    if (storage_.size() < config_.capacity) {
      index = storage_.size();
      storage_.push_back({std::move(transition), next_serial_, {}});
    } else {
      index = write_pos_;
      storage_[index] = {std::move(transition), next_serial_, {}};
    }
    write_pos_ = (index + 1) % config_.capacity;
    ++next_serial_;
    for (int k = 0; k < kNumTracks; ++k) set_priority(k, index, max_priority_[k]);
    return index;
  }

  /// Analytic sampling probability p_i^alpha / sum p^alpha on a track.
  double probability(Track track, std::size_t index) const {
    const SumTree& tree = trees_[static_cast<int>(track)];
    return tree.get(index) / tree.total();
  }

  double priority(Track track, std::size_t index) const {
    return storage_[index].priority[static_cast<std::size_t>(track)];
  }

  SampleBatch sample(Track track, std::size_t batch_size, double beta,
                     Rng& rng) const {
    if (batch_size == 0) throw ConfigError("batch size must be > 0");
    if (storage_.size() < batch_size) {
      throw NotReadyError("replay holds " + std::to_string(storage_.size()) +
                          " transitions, " + std::to_string(batch_size) +
                          " requested");
    }
    const SumTree& tree = trees_[static_cast<int>(track)];
    const double total = tree.total();
    const double n = static_cast<double>(storage_.size());

    SampleBatch batch;
    batch.track = track;
    batch.transitions.reserve(batch_size);
    batch.indices.reserve(batch_size);
    batch.serials.reserve(batch_size);
    batch.weights.reserve(batch_size);
    double max_weight = 0.0;
    for (std::size_t i = 0; i < batch_size; ++i) {
      const double mass = uniform01(rng) * total;
      std::size_t index = tree.find(mass);
      if (index >= storage_.size()) index = storage_.size() - 1;
      const double p = tree.get(index) / total;
      const double w = std::pow(n * p, -beta);
      max_weight = std::max(max_weight, w);
      batch.transitions.push_back(storage_[index].transition);
      batch.indices.push_back(index);
      batch.serials.push_back(storage_[index].serial);
      batch.weights.push_back(w);
    }
    for (double& w : batch.weights) w /= max_weight;
    return batch;
  }

  /// priority = |td| + floor on `track` only. Entries overwritten since they
  /// were sampled are skipped and counted.
  void update_priorities(Track track, std::span<const std::size_t> indices,
                         std::span<const std::uint64_t> serials,
                         std::span<const double> td_errors) {
    if (indices.size() != td_errors.size() || indices.size() != serials.size()) {
      throw ContractError("priority update size mismatch");
    }
    const int k = static_cast<int>(track);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      const std::size_t index = indices[i];
      if (index >= storage_.size() || storage_[index].serial != serials[i]) {
        ++stale_updates_[k];
        continue;
      }
      const double p = std::abs(td_errors[i]) + config_.priority_floor;
      max_priority_[k] = std::max(max_priority_[k], p);
      set_priority(k, index, p);
    }
  }

  void update_priorities(const SampleBatch& batch,
                         std::span<const double> td_errors) {
    update_priorities(batch.track, batch.indices, batch.serials, td_errors);
  }

  std::uint64_t stale_updates(Track track) const {
    return stale_updates_[static_cast<int>(track)];
  }

  // Snapshot: "QMRB" magic, version, config, ring bookkeeping, then one
  // length-prefixed record per stored transition. All little-endian.

  void save(std::ostream& out) const {
    io::write_magic(out, "QMRB", kSnapshotVersion);
    io::write_le<std::uint64_t>(out, config_.capacity);
    io::write_le<double>(out, config_.alpha);
    io::write_le<double>(out, config_.priority_floor);
    io::write_le<std::uint64_t>(out, storage_.size());
    io::write_le<std::uint64_t>(out, write_pos_);
    io::write_le<std::uint64_t>(out, next_serial_);
    for (int k = 0; k < kNumTracks; ++k) {
      io::write_le<double>(out, max_priority_[k]);
      io::write_le<std::uint64_t>(out, stale_updates_[k]);
    }
    for (const Entry& e : storage_) {
      std::ostringstream rec;
      io::write_le<std::uint64_t>(rec, e.serial);
      for (double p : e.priority) io::write_le<double>(rec, p);
      write_transition(rec, e.transition);
      const std::string bytes = rec.str();
      io::write_string(out, bytes);
    }
  }

  static PrioritizedBuffer load(std::istream& in) {
    io::expect_magic(in, "QMRB", kSnapshotVersion);
    ReplayConfig cfg;
    cfg.capacity = io::read_le<std::uint64_t>(in);
    cfg.alpha = io::read_le<double>(in);
    cfg.priority_floor = io::read_le<double>(in);
    PrioritizedBuffer buf(cfg);
    const auto n = io::read_le<std::uint64_t>(in);
    if (n > cfg.capacity) throw IoError("snapshot holds more than capacity");
    buf.write_pos_ = io::read_le<std::uint64_t>(in);
    buf.next_serial_ = io::read_le<std::uint64_t>(in);
    for (int k = 0; k < kNumTracks; ++k) {
      buf.max_priority_[k] = io::read_le<double>(in);
      buf.stale_updates_[k] = io::read_le<std::uint64_t>(in);
    }
    for (std::uint64_t i = 0; i < n; ++i) {
      std::istringstream rec(io::read_string(in, std::size_t{1} << 30));
      Entry e;
      e.serial = io::read_le<std::uint64_t>(rec);
      for (double& p : e.priority) p = io::read_le<double>(rec);
      e.transition = read_transition(rec);
      buf.storage_.push_back(std::move(e));
      for (int k = 0; k < kNumTracks; ++k) {
        buf.set_priority(k, i, buf.storage_.back().priority[static_cast<std::size_t>(k)]);
      }
    }
    return buf;
  }

 private:
  static constexpr std::uint32_t kSnapshotVersion = 1;

  struct Entry {
    Transition transition;
    std::uint64_t serial = 0;
    std::array<double, kNumTracks> priority{};
  };

  void set_priority(int track, std::size_t index, double p) {
    storage_[index].priority[static_cast<std::size_t>(track)] = p;
    trees_[track].set(index, std::pow(p, config_.alpha));
  }

  static void write_observation(std::ostream& out, const Observation& obs) {
    io::write_le<std::uint64_t>(out, obs.key);
    io::write_le<std::uint64_t>(out, obs.task_key);
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(obs.frames.size()));
    for (const auto& f : obs.frames) {
      io::write_le<std::int32_t>(out, f->width);
      io::write_le<std::int32_t>(out, f->height);
      io::write_floats<float>(out, f->pixels);
    }
  }

  static Observation read_observation(std::istream& in) {
    Observation obs;
    obs.key = io::read_le<std::uint64_t>(in);
    obs.task_key = io::read_le<std::uint64_t>(in);
    const auto k = io::read_le<std::uint32_t>(in);
    if (k > 1024) throw IoError("implausible frame stack depth");
    for (std::uint32_t i = 0; i < k; ++i) {
      auto f = std::make_shared<Frame>();
      f->width = io::read_le<std::int32_t>(in);
      f->height = io::read_le<std::int32_t>(in);
      if (f->width < 0 || f->height < 0 || f->width > 4096 || f->height > 4096) {
        throw IoError("implausible frame size");
      }
      f->pixels.resize(static_cast<std::size_t>(f->width) * f->height);
      io::read_floats<float>(in, f->pixels);
      obs.frames.push_back(std::move(f));
    }
    return obs;
  }

  static void write_transition(std::ostream& out, const Transition& t) {
    write_observation(out, t.obs_before);
    io::write_le<std::int32_t>(out, code(t.action));
    write_observation(out, t.obs_after);
    io::write_le<std::int32_t>(out, t.next_cell.x);
    io::write_le<std::int32_t>(out, t.next_cell.y);
    io::write_le<std::int32_t>(out, t.view_shift.x);
    io::write_le<std::int32_t>(out, t.view_shift.y);
    io::write_le<float>(out, t.reward);
    const std::uint8_t flags = (t.terminal ? 1 : 0) | (t.timed_out ? 2 : 0) |
                               (t.reached_flag ? 4 : 0);
    io::write_le<std::uint8_t>(out, flags);
    io::write_le<std::int32_t>(out, t.world_pos_after.col);
    io::write_le<std::int32_t>(out, t.world_pos_after.row);
  }

  static Transition read_transition(std::istream& in) {
    Transition t;
    t.obs_before = read_observation(in);
    const int a = io::read_le<std::int32_t>(in);
    if (a < 0 || a >= kNumActions) throw IoError("bad action code");
    t.action = action_from_code(a);
    t.obs_after = read_observation(in);
    t.next_cell.x = io::read_le<std::int32_t>(in);
    t.next_cell.y = io::read_le<std::int32_t>(in);
    t.view_shift.x = io::read_le<std::int32_t>(in);
    t.view_shift.y = io::read_le<std::int32_t>(in);
    t.reward = io::read_le<float>(in);
    const auto flags = io::read_le<std::uint8_t>(in);
    t.terminal = flags & 1;
    t.timed_out = flags & 2;
    t.reached_flag = flags & 4;
    t.world_pos_after.col = io::read_le<std::int32_t>(in);
    t.world_pos_after.row = io::read_le<std::int32_t>(in);
    return t;
  }

  ReplayConfig config_;
  std::vector<Entry> storage_;
  std::array<SumTree, kNumTracks> trees_;
  std::array<double, kNumTracks> max_priority_{1.0, 1.0};
  std::array<std::uint64_t, kNumTracks> stale_updates_{};
  std::size_t write_pos_ = 0;
  std::uint64_t next_serial_ = 0;
};

}  // namespace qmaplab

#endif  // QMAPLAB_REPLAY_PRIORITIZED_BUFFER_HPP_
