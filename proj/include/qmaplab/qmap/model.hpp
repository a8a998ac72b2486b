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

#ifndef QMAPLAB_QMAP_MODEL_HPP_
#define QMAPLAB_QMAP_MODEL_HPP_

#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "qmaplab/env/scroll_world.hpp"
#include "qmaplab/qmap/qmap_tensor.hpp"

namespace qmaplab {

/// Anything that maps an observation to a Q-map tensor.
class QMapModel {
 public:
  virtual ~QMapModel() = default;
  virtual QMapTensor forward(const Observation& obs) const = 0;
  virtual int grid_height() const = 0;
  virtual int grid_width() const = 0;
};

struct TrainResult {
  double loss = 0.0;
  std::vector<double> td_errors;  // one per transition, fed back as priorities
};

/// A trainable Q-map backend.
class QMapLearner : public QMapModel {
 public:
  virtual TrainResult train_step(std::span<const Transition> batch,
                                 std::span<const double> weights) = 0;
  /// Copies online parameters into the frozen target.
  virtual void sync_target() = 0;
  virtual void save(std::ostream& out) const = 0;
  virtual void load(std::istream& in) = 0;
};

}  // namespace qmaplab

#endif  // QMAPLAB_QMAP_MODEL_HPP_
