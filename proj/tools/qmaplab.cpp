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

// Command-line front end: run, explore, oracle and plot.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmaplab.hpp"

namespace {

using qmaplab::RunConfig;

struct CommonArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::int64_t seed = -1;
  std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool need_config) {
  auto* c = cmd->add_option("--config", args.config, "flat key = value config file");
  if (need_config) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--set", args.overrides, "override a config key (key=value)")
      ->allow_extra_args(false);
  cmd->add_option("--seed", args.seed, "run seed (overrides the config)");
  cmd->add_option("--out", args.out, "output directory")->required();
}

RunConfig resolve_config(const CommonArgs& args) {
  RunConfig config = args.config.empty() ? RunConfig{} : qmaplab::load_config_file(args.config);
  for (const auto& o : args.overrides) qmaplab::apply_override(config, o);
  if (args.seed >= 0) config.seed = static_cast<std::uint64_t>(args.seed);
  config.validate();
  if (config.level.empty()) throw qmaplab::ConfigError("config does not name a level");
  return config;
}

int cmd_run(const CommonArgs& args) {
  const RunConfig config = resolve_config(args);
  const qmaplab::Level level = qmaplab::load_level_file(config.level);
  qmaplab::RunOptions options;
  options.record_trace = config.decision_log;
  const auto result = qmaplab::run_experiment(config, level, options);
  qmaplab::emit_artifacts(result, config, level, args.out);
  std::cout << "mode " << qmaplab::mode_name(config.mode) << ", seed " << config.seed
            << ": " << config.total_steps << " steps, " << result.episode_returns.size()
            << " episodes, " << result.flags << " flags, " << result.mask.count()
            << " cells visited, rightmost column " << result.mask.rightmost() << "\n";
  return 0;
}

int cmd_explore(const CommonArgs& args) {
  const RunConfig config = resolve_config(args);
  const qmaplab::Level level = qmaplab::load_level_file(config.level);
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < config.explore_seeds; ++i) seeds.push_back(config.seed + i);
  const auto report = qmaplab::explore_compare(config, level, config.total_steps, seeds);
  qmaplab::emit_coverage(report, args.out);
  std::cout << "median unique cells: qmap_walk " << report.median_cells_qmap
            << ", random_walk " << report.median_cells_random << " (sign test p "
            << report.cells.p_value << ")\n"
            << "median rightmost column: qmap_walk " << report.median_rightmost_qmap
            << ", random_walk " << report.median_rightmost_random << " (sign test p "
            << report.rightmost.p_value << ")\n";
  return 0;
}

int cmd_oracle(const CommonArgs& args) {
  const RunConfig config = resolve_config(args);
  const qmaplab::Level level = qmaplab::load_level_file(config.level);
  qmaplab::emit_oracle(config, level, args.out);
  std::cout << "wrote ground-truth Q-map for " << config.level << " to " << args.out << "\n";
  return 0;
}

// Episode returns against steps as a graymap; flag episodes drawn brighter.
int cmd_plot(const CommonArgs& args) {
  const std::filesystem::path dir(args.out);
  std::ifstream in(dir / "metrics.csv");
  if (!in) throw qmaplab::IoError("cannot open " + (dir / "metrics.csv").string());
  const auto rows = qmaplab::read_metrics_csv(in);

  constexpr int kWidth = 400;
  constexpr int kHeight = 120;
  qmaplab::GrayImage img(kWidth, kHeight, 2);
  img.comment = "episode return vs step, 2 marks flag episodes";
  if (!rows.empty()) {
    double lo = 0.0, hi = 1e-9;
    for (const auto& r : rows) {
      lo = std::min(lo, r.episode_return);
      hi = std::max(hi, r.episode_return);
    }
    const double last = static_cast<double>(rows.back().step);
    long flags = 0;
    for (const auto& r : rows) {
      const int x = std::min(kWidth - 1, static_cast<int>(r.step / last * (kWidth - 1)));
      const double f = (r.episode_return - lo) / (hi - lo);
      const int y = std::clamp(kHeight - 1 - static_cast<int>(f * (kHeight - 1)), 0,
                               kHeight - 1);
      const bool flag = r.flags_reached_cumulative > flags;
      flags = r.flags_reached_cumulative;
      img.at(x, y) = flag ? 2 : std::max(img.at(x, y), 1);
    }
    std::cout << rows.size() << " rows, last step " << rows.back().step << ", flags "
              << rows.back().flags_reached_cumulative << ", best return " << hi << "\n";
  }
  std::ofstream out(dir / "returns.pgm");
  if (!out) throw qmaplab::IoError("cannot write " + (dir / "returns.pgm").string());
  qmaplab::write_pgm(out, img);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Q-map exploration experiments"};
  app.set_version_flag("--version", std::string(qmaplab::kVersion));
  app.require_subcommand(1);

  CommonArgs run_args, explore_args, oracle_args, plot_args;
  auto* run = app.add_subcommand("run", "train one agent and write metrics and masks");
  add_common(run, run_args, true);
  auto* explore = app.add_subcommand("explore", "compare Q-map walk with random walk");
  add_common(explore, explore_args, true);
  auto* oracle = app.add_subcommand("oracle", "write the ground-truth Q-map of the start state");
  add_common(oracle, oracle_args, true);
  auto* plot = app.add_subcommand("plot", "render the return curve of a finished run");
  add_common(plot, plot_args, false);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_args);
    if (*explore) return cmd_explore(explore_args);
    if (*oracle) return cmd_oracle(oracle_args);
    if (*plot) return cmd_plot(plot_args);
  } catch (const qmaplab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
