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

#ifndef QMAPLAB_CORE_RANDOM_HPP_
#define QMAPLAB_CORE_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace qmaplab {

using Rng = std::mt19937_64;

/// Independent random streams derived from a single run seed. Each consumer
/// owns one stream so that adding or removing a consumer never shifts the
/// draws seen by another.
enum class Stream : std::uint32_t {
  kEnv = 1,
  kPolicy = 2,
  kReplayQMap = 3,
  kReplayDqn = 4,
  kInitQMap = 5,
  kInitDqn = 6,
};

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x51a7u};
  return Rng(seq);
}

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). n must be positive.
inline int uniform_int(Rng& rng, int n) {
  return static_cast<int>(uniform01(rng) * n);
}

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace qmaplab

#endif  // QMAPLAB_CORE_RANDOM_HPP_
