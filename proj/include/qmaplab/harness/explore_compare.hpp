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

#ifndef QMAPLAB_HARNESS_EXPLORE_COMPARE_HPP_
#define QMAPLAB_HARNESS_EXPLORE_COMPARE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "qmaplab/harness/runner.hpp"
#include "qmaplab/harness/stats.hpp"

namespace qmaplab {

struct CoverageRun {
  std::uint64_t seed = 0;
  long unique_cells = 0;
  int rightmost = -1;
  VisitationMask mask;
};

struct CoverageReport {
  long steps = 0;
  std::vector<CoverageRun> qmap_walk;
  std::vector<CoverageRun> random_walk;
  double median_cells_qmap = 0.0;
  double median_cells_random = 0.0;
  double median_rightmost_qmap = 0.0;
  double median_rightmost_random = 0.0;
  SignTest cells;      // qmap_walk > random_walk
  SignTest rightmost;  // qmap_walk > random_walk
};

/// Runs the goal-driven Q-map walk and the random walk with the same budget
/// on every seed and compares their coverage.
inline CoverageReport explore_compare(const RunConfig& base, const Level& level, long steps,
                                      std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw ConfigError("explore_compare needs at least one seed");
  CoverageReport report;
  report.steps = steps;
  std::vector<double> cq, cr, rq, rr;
  for (const std::uint64_t seed : seeds) {
    for (const RunMode mode : {RunMode::kQMapWalk, RunMode::kRandomWalk}) {
      RunConfig c = base;
      c.mode = mode;
      c.seed = seed;
      c.total_steps = steps;
      RunResult r = run_experiment(c, level);
      CoverageRun run{seed, r.mask.count(), r.mask.rightmost(), std::move(r.mask)};
      if (mode == RunMode::kQMapWalk) {
        cq.push_back(static_cast<double>(run.unique_cells));
        rq.push_back(run.rightmost);
        report.qmap_walk.push_back(std::move(run));
      } else {
        cr.push_back(static_cast<double>(run.unique_cells));
        rr.push_back(run.rightmost);
        report.random_walk.push_back(std::move(run));
      }
    }
  }
  report.median_cells_qmap = median(cq);
  report.median_cells_random = median(cr);
  report.median_rightmost_qmap = median(rq);
  report.median_rightmost_random = median(rr);
  report.cells = sign_test(cq, cr);
  report.rightmost = sign_test(rq, rr);
  return report;
}

}  // namespace qmaplab

#endif  // QMAPLAB_HARNESS_EXPLORE_COMPARE_HPP_
