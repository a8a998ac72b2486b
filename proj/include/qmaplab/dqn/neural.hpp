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

#ifndef QMAPLAB_DQN_NEURAL_HPP_
#define QMAPLAB_DQN_NEURAL_HPP_

#include <algorithm>
#include <vector>

#include "qmaplab/core/errors.hpp"
#include "qmaplab/core/random.hpp"
#include "qmaplab/dqn/model.hpp"
#include "qmaplab/nn/architecture.hpp"
#include "qmaplab/nn/losses.hpp"
#include "qmaplab/nn/network.hpp"

namespace qmaplab {

struct NeuralDqnConfig {
  double gamma = 0.99;
  double learning_rate = 1e-4;
  bool dueling = true;
  bool huber = false;
  nn::Architecture arch = nn::desk_architecture();
};

/// Double DQN over the shared encoder architecture, with a dueling head by
/// default.
class NeuralDqn final : public TaskLearner {
 public:
  NeuralDqn(const NeuralDqnConfig& config, nn::Shape input, Rng& init_rng)
      : config_(config) {
    if (!(config.gamma > 0.0 && config.gamma < 1.0)) {
      throw ConfigError("task gamma must be in (0, 1)");
    }
    if (config.dueling) {
      online_ = nn::dueling_network(input, config.arch, kNumActions).build<float>();
    } else {
      nn::NetworkBuilder b(input);
      nn::add_encoder(b, config.arch);
      online_ = b.dense(config.arch.hidden).relu().dense(kNumActions).build<float>();
    }
    online_.init(init_rng);
    target_ = online_;
    adam_ = nn::Adam<float>(online_.param_count(), config.learning_rate);
    grad_.assign(online_.param_count(), 0.0f);
  }

  const nn::Network<float>& network() const { return online_; }
  nn::Network<float>& network() { return online_; }

  QValues forward(const Observation& obs) const override { return run(online_, obs); }
  QValues forward_target(const Observation& obs) const { return run(target_, obs); }

  TrainResult train_step(std::span<const Transition> batch,
                         std::span<const double> weights) override {
    const TargetView frozen(*this);
    const auto y = dqn_targets(batch, *this, frozen, config_.gamma);
    std::vector<std::vector<float>> inputs;
    std::vector<int> actions;
    inputs.reserve(batch.size());
    for (const auto& t : batch) {
      inputs.push_back(t.obs_before.input<float>());
      actions.push_back(code(t.action));
    }
    std::fill(grad_.begin(), grad_.end(), 0.0f);
    TrainResult result;
    result.loss = nn::action_regression<float>(online_, inputs, actions, y, weights, grad_,
                                               config_.huber, &result.td_errors);
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
  class TargetView final : public TaskModel {
   public:
    explicit TargetView(const NeuralDqn& owner) : owner_(owner) {}
    QValues forward(const Observation& obs) const override {
      return owner_.forward_target(obs);
    }

   private:
    const NeuralDqn& owner_;
  };

  QValues run(const nn::Network<float>& net, const Observation& obs) const {
    const auto& s = net.input_shape();
    if (obs.channels() != s.c || obs.height() != s.h || obs.width() != s.w) {
      throw ConfigError("observation shape does not match the task network input " +
                        nn::to_string(s));
    }
    const auto out = net.forward(obs.input<float>());
    QValues q{};
    std::copy(out.begin(), out.end(), q.begin());
    return q;
  }

  NeuralDqnConfig config_;
  nn::Network<float> online_;
  nn::Network<float> target_;
  nn::Adam<float> adam_;
  std::vector<float> grad_;
};

}  // namespace qmaplab

#endif  // QMAPLAB_DQN_NEURAL_HPP_
