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

#ifndef QMAPLAB_HARNESS_ARTIFACTS_HPP_
#define QMAPLAB_HARNESS_ARTIFACTS_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include <json.hpp>

#include "qmaplab/env/oracle.hpp"
#include "qmaplab/harness/explore_compare.hpp"
#include "qmaplab/harness/runner.hpp"
#include "qmaplab/version.hpp"

namespace qmaplab {

/// Q-map plane for one action as a graymap, values clipped to [0, 1].
inline GrayImage heatmap_image(const QMapTensor& q, Action a) {
  GrayImage img(q.width(), q.height(), 255);
  img.comment = std::string("action ") + action_name(a);
  for (int y = 0; y < q.height(); ++y) {
    for (int x = 0; x < q.width(); ++x) {
      const double v = std::clamp(static_cast<double>(q.at(y, x, code(a))), 0.0, 1.0);
      img.at(x, y) = static_cast<int>(std::lround(v * 255.0));
    }
  }
  return img;
}

namespace artifacts_detail {

inline void write_file(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

inline void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create directory " + dir.string() +
                  (ec ? ": " + ec.message() : std::string()));
  }
}

inline void write_heatmaps(const std::filesystem::path& dir, const std::string& prefix,
                           const QMapTensor& q) {
  for (int a = 0; a < kNumActions; ++a) {
    const Action act = action_from_code(a);
    write_file(dir / (prefix + "_" + action_name(act) + ".pgm"),
               [&](std::ostream& o) { write_pgm(o, heatmap_image(q, act)); });
  }
}

}  // namespace artifacts_detail

/// Writes metrics.csv, mask.pgm, manifest.json, learner checkpoints, the
/// learned Q-map at the start state and, when traced, decisions.csv.
inline void emit_artifacts(const RunResult& result, const RunConfig& config,
                           const Level& level, const std::filesystem::path& outdir) {
  using artifacts_detail::write_file;
  artifacts_detail::make_dir(outdir);
  write_file(outdir / "metrics.csv",
             [&](std::ostream& o) { write_metrics_csv(o, result.rows); });
  write_file(outdir / "mask.pgm",
             [&](std::ostream& o) { write_pgm(o, result.mask.to_image()); });
  if (!result.trace.empty()) {
    write_file(outdir / "decisions.csv",
               [&](std::ostream& o) { write_decision_csv(o, result.trace); });
  }
  if (result.qmap) {
    write_file(outdir / "qmap.ckpt", [&](std::ostream& o) { result.qmap->save(o); });
    Level l = level;
    if (config.episode_cap > 0) l.episode_cap = config.episode_cap;
    const ScrollWorld world(l, config.env);
    const auto start = world.reset().second;
    artifacts_detail::write_heatmaps(outdir, "qmap_learned", result.qmap->forward(start));
  }
  if (result.dqn) {
    write_file(outdir / "dqn.ckpt", [&](std::ostream& o) { result.dqn->save(o); });
  }

  nlohmann::ordered_json manifest;
  manifest["version"] = kVersion;
  manifest["mode"] = mode_name(config.mode);
  manifest["seed"] = config.seed;
  nlohmann::ordered_json cfg;
  for (const auto& [k, v] : config_entries(config)) cfg[k] = v;
  manifest["config"] = cfg;
  manifest["level"] = {{"width", level.width}, {"height", level.height}};
  manifest["summary"] = {{"steps", config.total_steps},
                         {"episodes", result.episode_returns.size()},
                         {"flags", result.flags},
                         {"first_flag_step", result.first_flag_step},
                         {"unique_cells", result.mask.count()},
                         {"rightmost_column", result.mask.rightmost()}};
  write_file(outdir / "manifest.json",
             [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
}

/// Ground-truth Q-map heatmaps at the start state plus a distance table.
inline void emit_oracle(const RunConfig& config, const Level& level,
                        const std::filesystem::path& outdir) {
  using artifacts_detail::write_file;
  artifacts_detail::make_dir(outdir);
  const ScrollWorld world(level, config.env);
  const WorldState start = world.reset().first;
  const QMapTensor q = ground_truth_qmap(world, start, config.qmap.gamma);
  artifacts_detail::write_heatmaps(outdir, "qmap_oracle", q);
  write_file(outdir / "oracle_distances.csv", [&](std::ostream& o) {
    o << "x,y,distance\n";
    for (int y = 0; y < q.height(); ++y) {
      for (int x = 0; x < q.width(); ++x) {
        const float v = q.clipped_max({x, y});
        o << x << ',' << y << ',';
        if (v > 0.0f) {
          o << expected_steps(v, config.qmap.gamma);
        } else {
          o << "unreachable";
        }
        o << '\n';
      }
    }
  });
}

inline void emit_coverage(const CoverageReport& report, const std::filesystem::path& outdir) {
  using artifacts_detail::write_file;
  artifacts_detail::make_dir(outdir);
  write_file(outdir / "coverage.csv", [&](std::ostream& o) {
    o << "seed,mode,unique_cells,rightmost_column\n";
    for (std::size_t i = 0; i < report.qmap_walk.size(); ++i) {
      for (const auto* run : {&report.qmap_walk[i], &report.random_walk[i]}) {
        o << run->seed << ',' << (run == &report.qmap_walk[i] ? "qmap_walk" : "random_walk")
          << ',' << run->unique_cells << ',' << run->rightmost << '\n';
      }
    }
  });
  for (std::size_t i = 0; i < report.qmap_walk.size(); ++i) {
    const auto& q = report.qmap_walk[i];
    write_file(outdir / ("overlay_seed" + std::to_string(q.seed) + ".pgm"),
               [&](std::ostream& o) {
                 GrayImage img = overlay_masks(report.random_walk[i].mask, q.mask);
                 img.comment = "0 none, 1 random_walk, 2 qmap_walk, 3 both";
                 write_pgm(o, img);
               });
  }
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["steps"] = report.steps;
  j["seeds"] = report.qmap_walk.size();
  j["median_unique_cells"] = {{"qmap_walk", report.median_cells_qmap},
                              {"random_walk", report.median_cells_random}};
  j["median_rightmost_column"] = {{"qmap_walk", report.median_rightmost_qmap},
                                  {"random_walk", report.median_rightmost_random}};
  auto test_json = [](const SignTest& t) {
    return nlohmann::ordered_json{{"wins", t.positive}, {"losses", t.negative},
                                  {"ties", t.ties}, {"p_value", t.p_value}};
  };
  j["sign_test_unique_cells"] = test_json(report.cells);
  j["sign_test_rightmost_column"] = test_json(report.rightmost);
  write_file(outdir / "coverage.json", [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

}  // namespace qmaplab

#endif  // QMAPLAB_HARNESS_ARTIFACTS_HPP_
