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

#ifndef QMAPLAB_QMAPLAB_HPP_
#define QMAPLAB_QMAPLAB_HPP_

#include "qmaplab/core/binary_io.hpp"
#include "qmaplab/core/errors.hpp"
#include "qmaplab/core/random.hpp"
#include "qmaplab/dqn/model.hpp"
#include "qmaplab/dqn/neural.hpp"
#include "qmaplab/dqn/tabular.hpp"
#include "qmaplab/env/level.hpp"
#include "qmaplab/env/oracle.hpp"
#include "qmaplab/env/scroll_world.hpp"
#include "qmaplab/explore/controller.hpp"
#include "qmaplab/explore/policy.hpp"
#include "qmaplab/harness/artifacts.hpp"
#include "qmaplab/harness/config.hpp"
#include "qmaplab/harness/explore_compare.hpp"
#include "qmaplab/harness/metrics.hpp"
#include "qmaplab/harness/runner.hpp"
#include "qmaplab/harness/stats.hpp"
#include "qmaplab/nn/architecture.hpp"
#include "qmaplab/nn/layers.hpp"
#include "qmaplab/nn/losses.hpp"
#include "qmaplab/nn/network.hpp"
#include "qmaplab/qmap/model.hpp"
#include "qmaplab/qmap/neural.hpp"
#include "qmaplab/qmap/qmap_tensor.hpp"
#include "qmaplab/qmap/queries.hpp"
#include "qmaplab/qmap/tabular.hpp"
#include "qmaplab/qmap/targets.hpp"
#include "qmaplab/replay/prioritized_buffer.hpp"
#include "qmaplab/replay/sum_tree.hpp"
#include "qmaplab/version.hpp"

#endif  // QMAPLAB_QMAPLAB_HPP_
