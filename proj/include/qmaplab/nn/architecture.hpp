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

#ifndef QMAPLAB_NN_ARCHITECTURE_HPP_
#define QMAPLAB_NN_ARCHITECTURE_HPP_

#include <string>
#include <vector>

#include "qmaplab/core/errors.hpp"
#include "qmaplab/nn/network.hpp"

namespace qmaplab::nn {

struct ConvSpec {
  int channels = 32;
  int kernel = 3;
  int stride = 1;
  int pad = 0;
};

struct DeconvSpec {
  int channels = 32;  // ignored for the last layer, which emits one plane per action
  int kernel = 3;
  int stride = 1;
};

/// Convolutional encoder, one hidden dense layer, then a transposed
/// convolution decoder (the Q-map network) or a dueling head (the task
/// network). Encoder and dense layers use relu, decoder layers elu with a
/// linear last layer.
struct Architecture {
  std::vector<ConvSpec> convs;
  int hidden = 512;  // task network only; the Q-map hidden layer is the decoder seed
  int seed_channels = 32;
  std::vector<DeconvSpec> deconvs;
};

/// DQN-style encoder (8/4, 4/2, 3/1) with a mirrored decoder whose strides
/// (1, 2, 2) give a 4x upsampling. Sized for 64x56 input and a 16x14 Q-map.
inline Architecture paper_architecture() {
  Architecture a;
  a.convs = {{32, 8, 4, 0}, {64, 4, 2, 0}, {64, 3, 1, 0}};
  a.hidden = 512;
  a.seed_channels = 32;
  a.deconvs = {{64, 3, 1}, {32, 4, 2}, {0, 8, 2}};
  return a;
}

/// Small variant for 1 pixel per cell viewports such as 16x12.
inline Architecture desk_architecture() {
  Architecture a;
  a.convs = {{16, 3, 1, 1}, {32, 4, 2, 1}, {32, 3, 2, 1}};
  a.hidden = 128;
  a.seed_channels = 16;
  a.deconvs = {{32, 3, 1}, {16, 4, 2}, {0, 3, 2}};
  return a;
}

inline void add_encoder(NetworkBuilder& b, const Architecture& arch) {
  for (const auto& c : arch.convs) b.conv(c.channels, c.kernel, c.stride, c.pad).relu();
}

/// Encoder + hidden + decoder producing `planes` x out_h x out_w.
inline NetworkBuilder qmap_network(Shape input, const Architecture& arch,
                                   int out_h, int out_w, int planes) {
  if (arch.deconvs.empty()) throw ConfigError("Q-map decoder needs at least one layer");
  // Walk the decoder backwards to find the seed size each layer starts from.
  std::vector<int> hs{out_h}, ws{out_w};
  for (auto it = arch.deconvs.rbegin(); it != arch.deconvs.rend(); ++it) {
    if (it->kernel < it->stride) throw ConfigError("decoder kernel smaller than stride");
    hs.push_back((hs.back() + it->stride - 1) / it->stride);
    ws.push_back((ws.back() + it->stride - 1) / it->stride);
  }
  const int seed_h = hs.back();
  const int seed_w = ws.back();

  NetworkBuilder b(input);
  add_encoder(b, arch);
  b.dense(arch.seed_channels * seed_h * seed_w).relu();
  b.reshape({arch.seed_channels, seed_h, seed_w});
  for (std::size_t i = 0; i < arch.deconvs.size(); ++i) {
    const bool last = i + 1 == arch.deconvs.size();
    const std::size_t level = arch.deconvs.size() - 1 - i;  // index into hs/ws
    const auto& d = arch.deconvs[i];
    b.conv_transpose(last ? planes : d.channels, d.kernel, d.stride,
                     hs[level], ws[level]);
    if (!last) b.elu();
  }
  return b;
}

inline NetworkBuilder dueling_network(Shape input, const Architecture& arch,
                                      int actions) {
  NetworkBuilder b(input);
  add_encoder(b, arch);
  b.dense(arch.hidden).relu().dueling(actions);
  return b;
}

}  // namespace qmaplab::nn

#endif  // QMAPLAB_NN_ARCHITECTURE_HPP_
