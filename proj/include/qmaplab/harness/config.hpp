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

#ifndef QMAPLAB_HARNESS_CONFIG_HPP_
#define QMAPLAB_HARNESS_CONFIG_HPP_

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qmaplab/core/errors.hpp"
#include "qmaplab/env/scroll_world.hpp"
#include "qmaplab/explore/controller.hpp"
#include "qmaplab/explore/policy.hpp"
#include "qmaplab/replay/prioritized_buffer.hpp"

namespace qmaplab {

enum class RunMode { kQMapDqn, kDqnBaseline, kQMapWalk, kRandomWalk };
enum class Backend { kTabular, kNeural };

inline const char* backend_name(Backend b) {
  switch (b) {
    case Backend::kTabular: return "tabular";
    case Backend::kNeural: return "neural";
  }
  return "?";
}

inline const char* mode_name(RunMode m) {
  switch (m) {
    case RunMode::kQMapDqn: return "qmap_dqn";
    case RunMode::kDqnBaseline: return "dqn_baseline";
    case RunMode::kQMapWalk: return "qmap_walk";
    case RunMode::kRandomWalk: return "random_walk";
  }
  return "?";
}

inline bool uses_qmap(RunMode m) {
  return m == RunMode::kQMapDqn || m == RunMode::kQMapWalk;
}
inline bool uses_dqn(RunMode m) {
  return m == RunMode::kQMapDqn || m == RunMode::kDqnBaseline;
}

struct LearnerConfig {
  Backend backend = Backend::kTabular;
  double gamma = 0.9;
  double learning_rate = 1e-4;
  /// Tabular update step.
  double step_size = 1.0;
  bool double_q = true;
  bool dueling = true;
  bool huber = false;
  /// Q-map only: bootstrap across scrolls at the same world position.
  bool align_view = true;
  /// "desk" or "paper" encoder.
  std::string arch = "desk";
};

struct RunConfig {
  std::string level;
  std::uint64_t seed = 0;
  RunMode mode = RunMode::kQMapDqn;
  long total_steps = 50'000;
  long learning_starts = 1000;
  long act_starts = 2000;
  long train_interval = 4;
  std::size_t batch_size = 32;
  long sync_period = 1000;
  long metrics_interval = 1000;
  /// Overrides the level's step cap when positive.
  int episode_cap = 0;
  bool decision_log = false;
  /// Number of seeds for the exploration comparison.
  int explore_seeds = 10;

  EnvConfig env;
  ReplayConfig replay;
  double beta_start = 0.4;
  double beta_end = 1.0;
  ControllerConfig controller;
  PolicyConfig policy;
  /// p_goal held at its initial value.
  bool freeze_p_goal = false;
  LearnerConfig qmap{Backend::kTabular, 0.9, 1e-4, 1.0, true, false, false, true, "desk"};
  LearnerConfig dqn{Backend::kTabular, 0.99, 1e-4, 0.5, true, true, false, false, "desk"};

  void validate() const {
    if (total_steps <= 0) throw ConfigError("total_steps must be positive");
    if (learning_starts < 0) throw ConfigError("learning_starts must be >= 0");
    if (act_starts < learning_starts) {
      throw ConfigError("act_starts must be >= learning_starts");
    }
    if (train_interval <= 0 || sync_period <= 0 || metrics_interval <= 0) {
      throw ConfigError("train_interval, sync_period and metrics_interval must be positive");
    }
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (episode_cap < 0) throw ConfigError("episode_cap must be >= 0");
    if (explore_seeds <= 0) throw ConfigError("explore.seeds must be positive");
    if (beta_start < 0.0 || beta_end < 0.0) throw ConfigError("beta must be >= 0");
    if (policy.goal_steps_min < 1 || policy.goal_steps_max < policy.goal_steps_min) {
      throw ConfigError("goal step range must satisfy 1 <= min <= max");
    }
    for (const LearnerConfig* l : {&qmap, &dqn}) {
      if (!(l->gamma > 0.0 && l->gamma < 1.0)) throw ConfigError("gamma must be in (0, 1)");
      if (l->arch != "desk" && l->arch != "paper") {
        throw ConfigError("arch must be desk or paper, got '" + l->arch + "'");
      }
    }
  }
};

namespace config_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("bad value for " + key + ": '" + v + "'");
  }
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  // from_chars for double is missing on some toolchains.
  std::istringstream in(v);
  in.imbue(std::locale::classic());
  double out;
  if (!(in >> out) || !(in >> std::ws).eof()) {
    throw ConfigError("bad value for " + key + ": '" + v + "'");
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

inline std::string format_double(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(17);
  out << v;
  return out.str();
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define QMAPLAB_INT_FIELD(name, member, type)                                       \
  {name,                                                                            \
   {[](RunConfig& c, const std::string& v) { c.member = parse_number<type>(name, v); }, \
    [](const RunConfig& c) { return std::to_string(c.member); }}}
#define QMAPLAB_DOUBLE_FIELD(name, member)                                          \
  {name,                                                                            \
   {[](RunConfig& c, const std::string& v) { c.member = parse_double(name, v); },   \
    [](const RunConfig& c) { return format_double(c.member); }}}
#define QMAPLAB_BOOL_FIELD(name, member)                                            \
  {name,                                                                            \
   {[](RunConfig& c, const std::string& v) { c.member = parse_bool(name, v); },     \
    [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }}}

inline Field backend_field(LearnerConfig RunConfig::*l) {
  return {[l](RunConfig& c, const std::string& v) {
            for (Backend b : {Backend::kTabular, Backend::kNeural}) {
              if (v == backend_name(b)) {
                (c.*l).backend = b;
                return;
              }
            }
            throw ConfigError("backend must be tabular or neural, got '" + v + "'");
          },
          [l](const RunConfig& c) { return std::string(backend_name((c.*l).backend)); }};
}

inline const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t = {
        {"level",
         {[](RunConfig& c, const std::string& v) { c.level = v; },
          [](const RunConfig& c) { return c.level; }}},
        {"mode",
         {[](RunConfig& c, const std::string& v) {
            if (v == "qmap_dqn") c.mode = RunMode::kQMapDqn;
            else if (v == "dqn_baseline") c.mode = RunMode::kDqnBaseline;
            else if (v == "qmap_walk") c.mode = RunMode::kQMapWalk;
            else if (v == "random_walk") c.mode = RunMode::kRandomWalk;
            else throw ConfigError("unknown mode '" + v + "'");
          },
          [](const RunConfig& c) { return std::string(mode_name(c.mode)); }}},
        QMAPLAB_INT_FIELD("seed", seed, std::uint64_t),
        QMAPLAB_INT_FIELD("total_steps", total_steps, long),
        QMAPLAB_INT_FIELD("learning_starts", learning_starts, long),
        QMAPLAB_INT_FIELD("act_starts", act_starts, long),
        QMAPLAB_INT_FIELD("train_interval", train_interval, long),
        QMAPLAB_INT_FIELD("batch_size", batch_size, std::size_t),
        QMAPLAB_INT_FIELD("sync_period", sync_period, long),
        QMAPLAB_INT_FIELD("metrics_interval", metrics_interval, long),
        QMAPLAB_INT_FIELD("episode_cap", episode_cap, int),
        QMAPLAB_BOOL_FIELD("decision_log", decision_log),
        QMAPLAB_INT_FIELD("explore.seeds", explore_seeds, int),

        QMAPLAB_INT_FIELD("env.frame_stack", env.frame_stack, int),
        QMAPLAB_INT_FIELD("env.px_per_cell", env.px_per_cell, int),
        QMAPLAB_INT_FIELD("env.rho", env.rho, int),
        QMAPLAB_INT_FIELD("env.lead_margin", env.lead_margin, int),
        QMAPLAB_INT_FIELD("env.jump_height", env.jump_height, int),
        QMAPLAB_DOUBLE_FIELD("env.coin_reward", env.coin_reward),
        QMAPLAB_DOUBLE_FIELD("env.flag_reward", env.flag_reward),
        QMAPLAB_DOUBLE_FIELD("env.hazard_reward", env.hazard_reward),

        QMAPLAB_INT_FIELD("replay.capacity", replay.capacity, std::size_t),
        QMAPLAB_DOUBLE_FIELD("replay.alpha", replay.alpha),
        QMAPLAB_DOUBLE_FIELD("replay.priority_floor", replay.priority_floor),
        QMAPLAB_DOUBLE_FIELD("replay.beta_start", beta_start),
        QMAPLAB_DOUBLE_FIELD("replay.beta_end", beta_end),

        QMAPLAB_DOUBLE_FIELD("explore.p_random_start", controller.random_action.start),
        QMAPLAB_DOUBLE_FIELD("explore.p_random_end", controller.random_action.end),
        QMAPLAB_DOUBLE_FIELD("explore.p_random_fraction", controller.random_action.fraction),
        QMAPLAB_DOUBLE_FIELD("explore.greedy_start", controller.greedy.start),
        QMAPLAB_DOUBLE_FIELD("explore.greedy_end", controller.greedy.end),
        QMAPLAB_DOUBLE_FIELD("explore.greedy_fraction", controller.greedy.fraction),
        QMAPLAB_DOUBLE_FIELD("explore.p_bias", controller.p_bias),
        QMAPLAB_DOUBLE_FIELD("explore.p_goal_initial", controller.p_goal_initial),
        QMAPLAB_BOOL_FIELD("explore.freeze_p_goal", freeze_p_goal),
        QMAPLAB_DOUBLE_FIELD("explore.ema_decay", controller.ema_decay),
        QMAPLAB_DOUBLE_FIELD("explore.gain", controller.gain),
        QMAPLAB_DOUBLE_FIELD("explore.ema_initial", controller.ema_initial),
        QMAPLAB_INT_FIELD("explore.goal_steps_min", policy.goal_steps_min, int),
        QMAPLAB_INT_FIELD("explore.goal_steps_max", policy.goal_steps_max, int),
        QMAPLAB_DOUBLE_FIELD("explore.time_supplement", policy.time_supplement),

        QMAPLAB_DOUBLE_FIELD("qmap.gamma", qmap.gamma),
        QMAPLAB_DOUBLE_FIELD("qmap.learning_rate", qmap.learning_rate),
        QMAPLAB_DOUBLE_FIELD("qmap.step_size", qmap.step_size),
        QMAPLAB_BOOL_FIELD("qmap.double_q", qmap.double_q),
        QMAPLAB_BOOL_FIELD("qmap.align_view", qmap.align_view),
        {"qmap.arch",
         {[](RunConfig& c, const std::string& v) { c.qmap.arch = v; },
          [](const RunConfig& c) { return c.qmap.arch; }}},

        QMAPLAB_DOUBLE_FIELD("dqn.gamma", dqn.gamma),
        QMAPLAB_DOUBLE_FIELD("dqn.learning_rate", dqn.learning_rate),
        QMAPLAB_DOUBLE_FIELD("dqn.step_size", dqn.step_size),
        QMAPLAB_BOOL_FIELD("dqn.dueling", dqn.dueling),
        QMAPLAB_BOOL_FIELD("dqn.huber", dqn.huber),
        {"dqn.arch",
         {[](RunConfig& c, const std::string& v) { c.dqn.arch = v; },
          [](const RunConfig& c) { return c.dqn.arch; }}},
    };
    t["qmap.backend"] = backend_field(&RunConfig::qmap);
    t["dqn.backend"] = backend_field(&RunConfig::dqn);
    return t;
  }();
  return table;
}

#undef QMAPLAB_INT_FIELD
#undef QMAPLAB_DOUBLE_FIELD
#undef QMAPLAB_BOOL_FIELD

}  // namespace config_detail

/// Sets one key; unknown keys and malformed values raise ConfigError.
inline void apply_setting(RunConfig& config, const std::string& key,
                          const std::string& value) {
  const auto& table = config_detail::fields();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second.set(config, value);
}

/// Applies a `key=value` override as given on the command line.
inline void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override must look like key=value: '" + std::string(assignment) + "'");
  }
  apply_setting(config, config_detail::trim(assignment.substr(0, eq)),
                config_detail::trim(assignment.substr(eq + 1)));
}

/// Parses flat `key = value` text. '#' starts a comment.
inline RunConfig parse_config(std::string_view text, RunConfig base = {}) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const std::string trimmed = config_detail::trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected key = value", line_no, 1);
    }
    const std::string key = config_detail::trim(std::string_view(trimmed).substr(0, eq));
    const std::string value = config_detail::trim(std::string_view(trimmed).substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no, 1);
    try {
      apply_setting(base, key, value);
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), line_no, static_cast<int>(eq) + 2);
    }
  }
  return base;
}

/// Reads a config file. A relative `level` path is resolved against the
/// config file's directory when it does not exist relative to the working
/// directory.
inline RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  RunConfig config;
  try {
    config = parse_config(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), e.line(), e.column(), path.string());
  }
  if (!config.level.empty()) {
    const std::filesystem::path level(config.level);
    if (level.is_relative() && !std::filesystem::exists(level)) {
      const auto candidate = path.parent_path() / level;
      if (std::filesystem::exists(candidate)) config.level = candidate.string();
    }
  }
  return config;
}

/// Every key with its current value, sorted by key.
inline std::map<std::string, std::string> config_entries(const RunConfig& config) {
  std::map<std::string, std::string> out;
  for (const auto& [key, field] : config_detail::fields()) out[key] = field.get(config);
  return out;
}

}  // namespace qmaplab

#endif  // QMAPLAB_HARNESS_CONFIG_HPP_
