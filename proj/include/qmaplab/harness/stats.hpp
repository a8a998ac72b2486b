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

#ifndef QMAPLAB_HARNESS_STATS_HPP_
#define QMAPLAB_HARNESS_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "qmaplab/core/errors.hpp"

namespace qmaplab {

inline double median(std::span<const double> values) {
  if (values.empty()) throw ContractError("median of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// P(X >= k) for X ~ Binomial(n, 1/2).
inline double binomial_upper_tail(int n, int k) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  double total = 0.0;
  for (int i = k; i <= n; ++i) {
    total += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                      std::lgamma(n - i + 1.0) - n * std::log(2.0));
  }
  return std::min(1.0, total);
}

struct SignTest {
  int positive = 0;  // pairs with first > second
  int negative = 0;
  int ties = 0;
  double p_value = 1.0;  // one-sided, first > second
};

/// One-sided paired sign test; ties are dropped.
inline SignTest sign_test(std::span<const double> first, std::span<const double> second) {
  if (first.size() != second.size()) throw ContractError("sign test needs paired samples");
  SignTest t;
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (first[i] > second[i]) ++t.positive;
    else if (first[i] < second[i]) ++t.negative;
    else ++t.ties;
  }
  t.p_value = binomial_upper_tail(t.positive + t.negative, t.positive);
  return t;
}

}  // namespace qmaplab

#endif  // QMAPLAB_HARNESS_STATS_HPP_
