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

#ifndef QMAPLAB_ENV_SCROLL_WORLD_HPP_
#define QMAPLAB_ENV_SCROLL_WORLD_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qmaplab/core/errors.hpp"
#include "qmaplab/core/random.hpp"
#include "qmaplab/env/level.hpp"

namespace qmaplab {

struct EnvConfig {
  int frame_stack = 3;
  int px_per_cell = 1;
  /// Q-map resolution divisor, in pixels.
  int rho = 1;
  /// Minimum number of cells kept between the agent and the right edge of the
  /// viewport. Negative selects viewport_width / 3.
  int lead_margin = -1;
  /// Rows gained by a platformer jump.
  int jump_height = 3;
  float coin_reward = 2.0f;
  float flag_reward = 50.0f;
  float hazard_reward = 0.0f;
};

/// Grayscale levels in the normalized range, -1 white to +1 black.
namespace intensity {
inline constexpr float kEmpty = -1.0f;
inline constexpr float kCoin = -0.33f;
inline constexpr float kFlag = 0.0f;
inline constexpr float kHazard = 0.33f;
inline constexpr float kAgent = 0.66f;
inline constexpr float kWall = 1.0f;
}  // namespace intensity

/// A cell of the Q-map grid (goal coordinates).
struct QCell {
  int x = 0;
  int y = 0;
  friend bool operator==(const QCell&, const QCell&) = default;
};

inline QCell qmap_cell(int viewport_col, int viewport_row, int px_per_cell,
                       int rho) {
  return {viewport_col * px_per_cell / rho, viewport_row * px_per_cell / rho};
}

/// The visible window for one world state, and the mapping between world
/// cells and Q-map cells it induces.
struct ViewFrame {
  int scroll_col = 0;
  int scroll_row = 0;
  int width = 0;   // cells
  int height = 0;  // cells
  int px_per_cell = 1;
  int rho = 1;

  int grid_width() const { return width * px_per_cell / rho; }
  int grid_height() const { return height * px_per_cell / rho; }

  bool contains(CellPos p) const {
    return p.col >= scroll_col && p.col < scroll_col + width &&
           p.row >= scroll_row && p.row < scroll_row + height;
  }
  std::optional<QCell> project(CellPos p) const {
    if (!contains(p)) return std::nullopt;
    return qmap_cell(p.col - scroll_col, p.row - scroll_row, px_per_cell, rho);
  }
  /// Top-left world cell covered by a Q-map cell.
  CellPos anchor(QCell g) const {
    return {scroll_col + g.x * rho / px_per_cell,
            scroll_row + g.y * rho / px_per_cell};
  }
};

/// The part of the world state that drives the dynamics. Coins are passable
/// and never influence motion, so they are not part of it.
struct DynState {
  int col = 0;
  int row = 0;
  int vy = 0;  // negative while rising
  int scroll_col = 0;
  friend bool operator==(const DynState&, const DynState&) = default;

  CellPos pos() const { return {col, row}; }
  std::uint64_t key() const {
    return (static_cast<std::uint64_t>(static_cast<std::uint16_t>(col)) << 48) |
           (static_cast<std::uint64_t>(static_cast<std::uint16_t>(row)) << 32) |
           (static_cast<std::uint64_t>(static_cast<std::uint16_t>(vy + 1024)) << 16) |
           static_cast<std::uint64_t>(static_cast<std::uint16_t>(scroll_col));
  }
};

struct Frame {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;  // row-major

  float at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  friend bool operator==(const Frame&, const Frame&) = default;
};

using FramePtr = std::shared_ptr<const Frame>;

/// A stack of the most recent frames, oldest first, plus the exact state keys
/// that the tabular learners index by.
struct Observation {
  std::vector<FramePtr> frames;
  std::uint64_t key = 0;       // dynamics state
  std::uint64_t task_key = 0;  // dynamics state and consumed coins

  int channels() const { return static_cast<int>(frames.size()); }
  int height() const { return frames.empty() ? 0 : frames.front()->height; }
  int width() const { return frames.empty() ? 0 : frames.front()->width; }
  std::size_t input_size() const {
    return static_cast<std::size_t>(channels()) * height() * width();
  }

  /// Channel-major network input.
  template <typename T>
  void write_input(std::span<T> out) const {
    std::size_t i = 0;
    for (const auto& f : frames) {
      for (float v : f->pixels) out[i++] = static_cast<T>(v);
    }
  }
  template <typename T = float>
  std::vector<T> input() const {
    std::vector<T> out(input_size());
    write_input<T>(out);
    return out;
  }

  /// Pixel-wise equality of the frame stacks.
  bool same_pixels(const Observation& other) const {
    if (frames.size() != other.frames.size()) return false;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      if (!(*frames[i] == *other.frames[i])) return false;
    }
    return true;
  }
};

struct WorldState {
  DynState dyn;
  std::vector<int> collected;  // sorted cell indices of consumed coins
  int step_count = 0;
  bool terminal = false;  // no further step accepted
  bool timed_out = false;
  Observation obs;

  CellPos position() const { return dyn.pos(); }
};

/// One environment step, the unit stored in replay.
struct Transition {
  Observation obs_before;
  Action action = Action::kNoop;
  Observation obs_after;
  QCell next_cell;  // agent's Q-map cell after the step
  /// Displacement of the view between the two observations, in Q-map cells.
  QCell view_shift;
  float reward = 0.0f;
  /// Absorbing termination (hazard or flag). Learners do not bootstrap.
  bool terminal = false;
  /// Episode cut by the step cap. Learners still bootstrap.
  bool timed_out = false;
  bool reached_flag = false;
  CellPos world_pos_after;

  bool ends_episode() const { return terminal || timed_out; }
};

struct StepResult {
  WorldState state;
  Transition transition;
};

/// Outcome of the pure dynamics for one action.
struct Motion {
  DynState next;
  std::array<CellPos, 2> path{};  // cells entered, in order
  int path_length = 0;
  bool hazard = false;
  bool flag = false;

  bool terminal() const { return hazard || flag; }
};

/// Deterministic scrolling gridworld. Immutable after construction; states
/// are values passed in and out.
class ScrollWorld {
 public:
  explicit ScrollWorld(Level level, EnvConfig config = {})
      : level_(std::move(level)), config_(config) {
    if (config_.frame_stack < 1) throw ConfigError("frame_stack must be >= 1");
    if (config_.px_per_cell < 1 || config_.rho < 1) {
      throw ConfigError("px_per_cell and rho must be >= 1");
    }
    if ((level_.viewport_width * config_.px_per_cell) % config_.rho != 0 ||
        (level_.viewport_height * config_.px_per_cell) % config_.rho != 0) {
      throw ConfigError("viewport pixels must be divisible by rho");
    }
    if (config_.jump_height < 1) throw ConfigError("jump_height must be >= 1");
    lead_margin_ = config_.lead_margin >= 0 ? config_.lead_margin
                                            : level_.viewport_width / 3;
    if (lead_margin_ >= level_.viewport_width) {
      throw ConfigError("lead_margin must be smaller than the viewport width");
    }
  }

  const Level& level() const { return level_; }
  const EnvConfig& config() const { return config_; }
  int lead_margin() const { return lead_margin_; }
  int grid_width() const {
    return level_.viewport_width * config_.px_per_cell / config_.rho;
  }
  int grid_height() const {
    return level_.viewport_height * config_.px_per_cell / config_.rho;
  }
  int frame_width() const { return level_.viewport_width * config_.px_per_cell; }
  int frame_height() const {
    return level_.viewport_height * config_.px_per_cell;
  }

  /// Vertical window follows the agent, centred and clamped to the level.
  int scroll_row_for(int row) const {
    return std::clamp(row - level_.viewport_height / 2, 0,
                      level_.height - level_.viewport_height);
  }

  ViewFrame view(const DynState& s) const {
    return {s.scroll_col,          scroll_row_for(s.row),
            level_.viewport_width, level_.viewport_height,
            config_.px_per_cell,   config_.rho};
  }

  DynState initial_dyn() const {
    DynState s{level_.start.col, level_.start.row, 0, 0};
    s.scroll_col = follow_scroll(0, s.col);
    return s;
  }

  Motion advance(const DynState& s, Action a) const {
    return level_.mode == PhysicsMode::kFlat ? advance_flat(s, a)
                                             : advance_platformer(s, a);
  }

  WorldState make_state(const DynState& dyn) const {
    WorldState st;
    st.dyn = dyn;
    const auto frame = std::make_shared<const Frame>(render(dyn, {}));
    st.obs.frames.assign(static_cast<std::size_t>(config_.frame_stack), frame);
    set_keys(st);
    return st;
  }

  /// Agent at Start, coins restored, frame stack filled with copies of the
  /// initial frame. The world has no stochastic elements; the seed is
  /// accepted for interface symmetry.
  std::pair<WorldState, Observation> reset(std::uint64_t /*seed*/ = 0) const {
    WorldState st = make_state(initial_dyn());
    Observation obs = st.obs;
    return {std::move(st), std::move(obs)};
  }

  StepResult step(const WorldState& state, Action action) const {
    if (state.terminal) throw ContractError("step called on a terminal state");
    const Motion m = advance(state.dyn, action);

    StepResult out;
    WorldState& next = out.state;
    next.dyn = m.next;
    next.collected = state.collected;
    next.step_count = state.step_count + 1;

    float reward = 0.0f;
    for (int i = 0; i < m.path_length; ++i) {
      const CellPos p = m.path[static_cast<std::size_t>(i)];
      switch (level_.at(p)) {
        case CellKind::kCoin: {
          const int idx = level_.index(p);
          auto it = std::lower_bound(next.collected.begin(),
                                     next.collected.end(), idx);
          if (it == next.collected.end() || *it != idx) {
            next.collected.insert(it, idx);
            reward += config_.coin_reward;
          }
          break;
        }
        case CellKind::kHazard:
          reward += config_.hazard_reward;
          break;
        case CellKind::kFlag:
          reward += config_.flag_reward;
          break;
        default:
          break;
      }
    }
    next.terminal = m.terminal();
    if (!next.terminal && next.step_count >= level_.episode_cap) {
      next.timed_out = true;
      next.terminal = true;
    }

    next.obs.frames.reserve(state.obs.frames.size());
    for (std::size_t i = 1; i < state.obs.frames.size(); ++i) {
      next.obs.frames.push_back(state.obs.frames[i]);
    }
    next.obs.frames.push_back(
        std::make_shared<const Frame>(render(next.dyn, next.collected)));
    set_keys(next);

    Transition& t = out.transition;
    t.obs_before = state.obs;
    t.action = action;
    t.obs_after = next.obs;
    t.next_cell = agent_qmap_cell(next);
    t.view_shift = view_shift(view(state.dyn), view(next.dyn));
    t.reward = reward;
    t.terminal = m.terminal();
    t.timed_out = next.timed_out;
    t.reached_flag = m.flag;
    t.world_pos_after = next.dyn.pos();
    return out;
  }

  /// Newest frame of the observation for `state`.
  Frame render_viewport(const WorldState& state) const {
    return render(state.dyn, state.collected);
  }

  /// How far `after` sits from `before`, in Q-map cells (floored when the
  /// scroll is not a whole number of cells).
  QCell view_shift(const ViewFrame& before, const ViewFrame& after) const {
    auto cells = [this](int d) {
      const int px = d * config_.px_per_cell;
      return px >= 0 ? px / config_.rho : -((-px + config_.rho - 1) / config_.rho);
    };
    return {cells(after.scroll_col - before.scroll_col),
            cells(after.scroll_row - before.scroll_row)};
  }

  QCell agent_qmap_cell(const WorldState& state) const {
    return agent_qmap_cell(state.dyn);
  }
  QCell agent_qmap_cell(const DynState& dyn) const {
    const auto cell = view(dyn).project(dyn.pos());
    if (!cell) throw OutOfViewError("agent outside the viewport");
    return *cell;
  }

 private:
  static constexpr std::array<int, kNumActions> kDx = {0, -1, 1, 0, -1, 1};

  static bool is_jump(Action a) {
    return a == Action::kJump || a == Action::kJumpLeft ||
           a == Action::kJumpRight;
  }

  /// Right-only scrolling: the window advances when the agent enters the
  /// lead margin.
  int follow_scroll(int scroll, int col) const {
    const int reach = level_.viewport_width - 1 - lead_margin_;
    if (col - scroll > reach) {
      scroll = std::min(col - reach, level_.width - level_.viewport_width);
    }
    return scroll;
  }

  bool horizontal_blocked(const DynState& s, int col, int row) const {
    return level_.blocked(col, row) || col < s.scroll_col;
  }

  void enter(Motion& m, CellPos p) const {
    m.path[static_cast<std::size_t>(m.path_length++)] = p;
    const CellKind k = level_.at(p);
    m.hazard = m.hazard || k == CellKind::kHazard;
    m.flag = m.flag || k == CellKind::kFlag;
  }

  Motion advance_flat(const DynState& s, Action a) const {
    Motion m;
    m.next = s;
    const int col = s.col + kDx[static_cast<std::size_t>(code(a))];
    const int row = s.row - (is_jump(a) ? 1 : 0);
    if ((col != s.col || row != s.row) && !horizontal_blocked(s, col, row)) {
      m.next.col = col;
      m.next.row = row;
      enter(m, m.next.pos());
    }
    m.next.scroll_col = follow_scroll(s.scroll_col, m.next.col);
    return m;
  }

  Motion advance_platformer(const DynState& s, Action a) const {
    Motion m;
    m.next = s;
    DynState& n = m.next;
    const bool standing = level_.blocked(s.col, s.row + 1);
    if (is_jump(a) && standing && s.vy == 0) n.vy = -config_.jump_height;

    const int dx = kDx[static_cast<std::size_t>(code(a))];
    if (dx != 0 && !horizontal_blocked(s, s.col + dx, s.row)) {
      n.col += dx;
      enter(m, n.pos());
    }
    if (!m.terminal()) {
      if (n.vy < 0) {
        if (!level_.blocked(n.col, n.row - 1)) {
          --n.row;
          ++n.vy;
          enter(m, n.pos());
        } else {
          n.vy = 0;
        }
      } else if (!level_.blocked(n.col, n.row + 1)) {
        ++n.row;
        enter(m, n.pos());
      }
    }
    n.scroll_col = follow_scroll(s.scroll_col, n.col);
    return m;
  }

  Frame render(const DynState& dyn, const std::vector<int>& collected) const {
    const ViewFrame v = view(dyn);
    const int ppc = config_.px_per_cell;
    Frame f;
    f.width = v.width * ppc;
    f.height = v.height * ppc;
    f.pixels.resize(static_cast<std::size_t>(f.width) * f.height);
    for (int vr = 0; vr < v.height; ++vr) {
      for (int vc = 0; vc < v.width; ++vc) {
        const CellPos p{v.scroll_col + vc, v.scroll_row + vr};
        float value = intensity::kEmpty;
        if (p == dyn.pos()) {
          value = intensity::kAgent;
        } else {
          switch (level_.at(p)) {
            case CellKind::kWall: value = intensity::kWall; break;
            case CellKind::kHazard: value = intensity::kHazard; break;
            case CellKind::kFlag: value = intensity::kFlag; break;
            case CellKind::kCoin:
              value = std::binary_search(collected.begin(), collected.end(),
                                         level_.index(p))
                          ? intensity::kEmpty
                          : intensity::kCoin;
              break;
            default: break;
          }
        }
        for (int py = 0; py < ppc; ++py) {
          float* row = &f.pixels[static_cast<std::size_t>(vr * ppc + py) *
                                     f.width + vc * ppc];
          std::fill(row, row + ppc, value);
        }
      }
    }
    return f;
  }

  static void set_keys(WorldState& st) {
    st.obs.key = st.dyn.key();
    std::uint64_t h = mix64(st.obs.key);
    for (int idx : st.collected) h = mix64(h ^ static_cast<std::uint64_t>(idx));
    st.obs.task_key = h;
  }

  Level level_;
  EnvConfig config_;
  int lead_margin_ = 0;
};

}  // namespace qmaplab

#endif  // QMAPLAB_ENV_SCROLL_WORLD_HPP_
