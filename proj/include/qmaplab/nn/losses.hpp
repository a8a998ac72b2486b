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

#ifndef QMAPLAB_NN_LOSSES_HPP_
#define QMAPLAB_NN_LOSSES_HPP_

#include <cmath>
#include <span>
#include <vector>

#include "qmaplab/core/errors.hpp"
#include "qmaplab/nn/network.hpp"

namespace qmaplab::nn {

/// Weighted squared error between the taken-action plane of the network
/// output (planes x cells) and a target map:
///   L = 1/B sum_i w_i sum_cells (Q_i[a_i] - target_i)^2.
/// Accumulates dL/dparams into `grad`. Per-transition mean absolute cell
/// errors go to `td_errors` when non-null.
template <typename T>
double plane_regression(const Network<T>& net,
                        std::span<const std::vector<T>> inputs,
                        std::span<const int> actions,
                        std::span<const std::vector<float>> targets,
                        std::span<const double> weights, std::span<T> grad,
                        std::vector<double>* td_errors = nullptr) {
  const std::size_t n = inputs.size();
  if (actions.size() != n || targets.size() != n || weights.size() != n || n == 0) {
    throw ContractError("plane_regression batch size mismatch");
  }
  const std::size_t plane = net.output_shape().h * static_cast<std::size_t>(net.output_shape().w);
  typename Network<T>::Tape tape;
  std::vector<T> grad_out(net.output_shape().size());
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto out = net.forward(inputs[i], tape);
    std::fill(grad_out.begin(), grad_out.end(), T(0));
    const std::size_t base = static_cast<std::size_t>(actions[i]) * plane;
    if (targets[i].size() != plane) throw ContractError("target map size mismatch");
    double sq = 0.0;
    double abs_sum = 0.0;
    for (std::size_t c = 0; c < plane; ++c) {
      const double err = static_cast<double>(out[base + c]) - targets[i][c];
      sq += err * err;
      abs_sum += std::abs(err);
      grad_out[base + c] = static_cast<T>(2.0 * weights[i] * err * scale);
    }
    loss += weights[i] * sq * scale;
    if (td_errors) td_errors->push_back(abs_sum / static_cast<double>(plane));
    net.backward(tape, grad_out, grad);
  }
  return loss;
}

/// Weighted squared (or Huber, delta 1) error of the taken-action value:
///   L = 1/B sum_i w_i l(Q_i[a_i] - y_i).
template <typename T>
double action_regression(const Network<T>& net,
                         std::span<const std::vector<T>> inputs,
                         std::span<const int> actions,
                         std::span<const double> targets,
                         std::span<const double> weights, std::span<T> grad,
                         bool huber, std::vector<double>* td_errors = nullptr) {
  const std::size_t n = inputs.size();
  if (actions.size() != n || targets.size() != n || weights.size() != n || n == 0) {
    throw ContractError("action_regression batch size mismatch");
  }
  typename Network<T>::Tape tape;
  std::vector<T> grad_out(net.output_shape().size());
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto out = net.forward(inputs[i], tape);
    const std::size_t a = static_cast<std::size_t>(actions[i]);
    const double delta = static_cast<double>(out[a]) - targets[i];
    double l, dl;
    if (!huber) {
      l = delta * delta;
      dl = 2.0 * delta;
    } else if (std::abs(delta) <= 1.0) {
      l = 0.5 * delta * delta;
      dl = delta;
    } else {
      l = std::abs(delta) - 0.5;
      dl = delta > 0 ? 1.0 : -1.0;
    }
    loss += weights[i] * l * scale;
    if (td_errors) td_errors->push_back(std::abs(delta));
    std::fill(grad_out.begin(), grad_out.end(), T(0));
    grad_out[a] = static_cast<T>(weights[i] * dl * scale);
    net.backward(tape, grad_out, grad);
  }
  return loss;
}

}  // namespace qmaplab::nn

#endif  // QMAPLAB_NN_LOSSES_HPP_
