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

#ifndef QMAPLAB_REPLAY_SUM_TREE_HPP_
#define QMAPLAB_REPLAY_SUM_TREE_HPP_

#include <cstddef>
#include <vector>

namespace qmaplab {

/// Binary tree of partial sums over a fixed number of leaves; O(log n)
/// update and prefix-sum search.
class SumTree {
 public:
  explicit SumTree(std::size_t leaves = 1) {
    while (leaves_ < leaves) leaves_ *= 2;
    nodes_.assign(2 * leaves_, 0.0);
  }

  std::size_t leaves() const { return leaves_; }
  double total() const { return nodes_[1]; }
  double get(std::size_t i) const { return nodes_[leaves_ + i]; }

  void set(std::size_t i, double value) {
    std::size_t node = leaves_ + i;
    nodes_[node] = value;
    for (node /= 2; node >= 1; node /= 2) {
      nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
    }
  }

  /// Smallest leaf i with prefix_sum(0..i) > mass.
  std::size_t find(double mass) const {
    std::size_t node = 1;
    while (node < leaves_) {
      const double left = nodes_[2 * node];
      if (mass < left) {
        node = 2 * node;
      } else {
        mass -= left;
        node = 2 * node + 1;
      }
    }
    return node - leaves_;
  }

 private:
  std::size_t leaves_ = 1;
  std::vector<double> nodes_;
};

}  // namespace qmaplab

#endif  // QMAPLAB_REPLAY_SUM_TREE_HPP_
