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

#ifndef QMAPLAB_QMAP_NEURAL_HPP_
#define QMAPLAB_QMAP_NEURAL_HPP_

#include <algorithm>
#include <vector>

#include "qmaplab/core/errors.hpp"
#include "qmaplab/core/random.hpp"
#include "qmaplab/nn/architecture.hpp"
#include "qmaplab/nn/losses.hpp"
#include "qmaplab/nn/network.hpp"
#include "qmaplab/qmap/model.hpp"
#include "qmaplab/qmap/targets.hpp"

namespace qmaplab {

struct NeuralQMapConfig {
  double gamma = 0.9;
  double learning_rate = 1e-4;
  bool double_q = true;
  /// Read bootstrap values across scrolls at the same world position.
  bool align_view = true;
  nn::Architecture arch = nn::desk_architecture();
};

/// Convolutional encoder-decoder Q-map with a frozen target copy.
class NeuralQMap final : public QMapLearner {
 public:
  /// `input` is frame_stack x frame_height x frame_width.
  NeuralQMap(const NeuralQMapConfig& config, nn::Shape input, int grid_height,
             int grid_width, Rng& init_rng)
      : config_(config), height_(grid_height), width_(grid_width) {
    if (!(config.gamma > 0.0 && config.gamma < 1.0)) {
      throw ConfigError("Q-map gamma must be in (0, 1)");
    }
    online_ = nn::qmap_network(input, config.arch, grid_height, grid_width, kNumActions)
                  .build<float>();
    online_.init(init_rng);
    target_ = online_;
    adam_ = nn::Adam<float>(online_.param_count(), config.learning_rate);
    grad_.assign(online_.param_count(), 0.0f);
  }

  int grid_height() const override { return height_; }
  int grid_width() const override { return width_; }
  const nn::Network<float>& network() const { return online_; }
  nn::Network<float>& network() { return online_; }
  const nn::Network<float>& target_network() const { return target_; }

  QMapTensor forward(const Observation& obs) const override {
    return run(online_, obs);
  }
  QMapTensor forward_target(const Observation& obs) const { return run(target_, obs); }

  TrainResult train_step(std::span<const Transition> batch,
                         std::span<const double> weights) override {
    const TargetView frozen(*this);
    const auto targets = compute_targets(batch, frozen, config_.gamma,
                                         config_.double_q ? this : nullptr,
                                         config_.align_view);
    std::vector<std::vector<float>> inputs;
    std::vector<int> actions;
    std::vector<std::vector<float>> maps;
    inputs.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      check(batch[i].obs_before);
      inputs.push_back(batch[i].obs_before.input<float>());
      actions.push_back(code(batch[i].action));
      maps.push_back(targets[i].values);
    }
    std::fill(grad_.begin(), grad_.end(), 0.0f);
    TrainResult result;
    result.loss = nn::plane_regression<float>(online_, inputs, actions, maps, weights,
                                              grad_, &result.td_errors);
    adam_.step(online_.params(), grad_);
    return result;
  }

  void sync_target() override { target_ = online_; }

  void save(std::ostream& out) const override { online_.save(out); }
  void load(std::istream& in) override {
    online_.load(in);
    target_ = online_;
  }

 private:
  /// The frozen network seen through the model interface.
  class TargetView final : public QMapModel {
   public:
    explicit TargetView(const NeuralQMap& owner) : owner_(owner) {}
    QMapTensor forward(const Observation& obs) const override {
      return owner_.forward_target(obs);
    }
    int grid_height() const override { return owner_.height_; }
    int grid_width() const override { return owner_.width_; }

   private:
    const NeuralQMap& owner_;
  };

  void check(const Observation& obs) const {
    const auto& s = online_.input_shape();
    if (obs.channels() != s.c || obs.height() != s.h || obs.width() != s.w) {
      throw ConfigError("observation shape does not match the Q-map network input " +
                        nn::to_string(s));
    }
  }

  QMapTensor run(const nn::Network<float>& net, const Observation& obs) const {
    check(obs);
    const auto out = net.forward(obs.input<float>());
    QMapTensor t(height_, width_);
    std::copy(out.begin(), out.end(), t.data().begin());
    return t;
  }

  NeuralQMapConfig config_;
  int height_;
  int width_;
  nn::Network<float> online_;
  nn::Network<float> target_;
  nn::Adam<float> adam_;
  std::vector<float> grad_;
};

}  // namespace qmaplab

#endif  // QMAPLAB_QMAP_NEURAL_HPP_
