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

#ifndef QMAPLAB_ENV_LEVEL_HPP_
#define QMAPLAB_ENV_LEVEL_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qmaplab/core/errors.hpp"

namespace qmaplab {

/// The six actions of the agent. Codes are stable and index Q-value arrays.
enum class Action : int {
  kNoop = 0,
  kLeft = 1,
  kRight = 2,
  kJump = 3,
  kJumpLeft = 4,
  kJumpRight = 5,
};

inline constexpr int kNumActions = 6;

inline constexpr Action action_from_code(int code) {
  return static_cast<Action>(code);
}
inline constexpr int code(Action a) { return static_cast<int>(a); }

inline const char* action_name(Action a) {
  switch (a) {
    case Action::kNoop: return "noop";
    case Action::kLeft: return "left";
    case Action::kRight: return "right";
    case Action::kJump: return "jump";
    case Action::kJumpLeft: return "jump_left";
    case Action::kJumpRight: return "jump_right";
  }
  return "?";
}

enum class CellKind : std::uint8_t { kEmpty, kWall, kHazard, kCoin, kFlag, kStart };

enum class PhysicsMode { kFlat, kPlatformer };

struct CellPos {
  int col = 0;
  int row = 0;
  friend bool operator==(const CellPos&, const CellPos&) = default;
};

/// A parsed level: the static grid plus the header parameters.
struct Level {
  int width = 0;
  int height = 0;
  std::vector<CellKind> cells;  // row-major
  PhysicsMode mode = PhysicsMode::kFlat;
  int episode_cap = 2394;
  int viewport_width = 0;
  int viewport_height = 0;
  CellPos start;

  bool in_bounds(int col, int row) const {
    return col >= 0 && row >= 0 && col < width && row < height;
  }
  CellKind at(int col, int row) const {
    return cells[static_cast<std::size_t>(row) * width + col];
  }
  CellKind at(CellPos p) const { return at(p.col, p.row); }
  /// Out-of-bounds cells behave as walls.
  bool blocked(int col, int row) const {
    return !in_bounds(col, row) || at(col, row) == CellKind::kWall;
  }
  int index(CellPos p) const { return p.row * width + p.col; }
};

namespace detail {

inline char cell_char(CellKind k) {
  switch (k) {
    case CellKind::kEmpty: return '.';
    case CellKind::kWall: return '#';
    case CellKind::kHazard: return 'x';
    case CellKind::kCoin: return 'o';
    case CellKind::kFlag: return 'F';
    case CellKind::kStart: return 'S';
  }
  return '?';
}

inline bool parse_cell(char c, CellKind& out) {
  switch (c) {
    case '.': out = CellKind::kEmpty; return true;
    case '#': out = CellKind::kWall; return true;
    case 'x': out = CellKind::kHazard; return true;
    case 'o': out = CellKind::kCoin; return true;
    case 'F': out = CellKind::kFlag; return true;
    case 'S': out = CellKind::kStart; return true;
    default: return false;
  }
}

inline int parse_positive(std::string_view text, int line, int column) {
  if (text.empty()) throw ParseError("expected integer", line, column);
  int v = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') {
      throw ParseError("expected integer, got '" + std::string(text) + "'",
                       line, column + static_cast<int>(i));
    }
    v = v * 10 + (c - '0');
    if (v > 1'000'000'000) throw ParseError("integer too large", line, column);
  }
  return v;
}

inline void parse_header(std::string_view header, Level& level,
                         bool& has_view) {
  std::size_t pos = 0;
  while (pos < header.size()) {
    while (pos < header.size() && header[pos] == ' ') ++pos;
    if (pos >= header.size()) break;
    std::size_t end = header.find(' ', pos);
    if (end == std::string_view::npos) end = header.size();
    const std::string_view token = header.substr(pos, end - pos);
    const int column = static_cast<int>(pos) + 1;
    const std::size_t eq = token.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("header token without '=': " + std::string(token), 1,
                       column);
    }
    const std::string_view key = token.substr(0, eq);
    const std::string_view value = token.substr(eq + 1);
    const int value_column = column + static_cast<int>(eq) + 1;
    if (key == "mode") {
      if (value == "flat") {
        level.mode = PhysicsMode::kFlat;
      } else if (value == "platformer") {
        level.mode = PhysicsMode::kPlatformer;
      } else {
        throw ParseError("unknown mode '" + std::string(value) + "'", 1,
                         value_column);
      }
    } else if (key == "cap") {
      level.episode_cap = parse_positive(value, 1, value_column);
    } else if (key == "view") {
      const std::size_t x = value.find('x');
      if (x == std::string_view::npos) {
        throw ParseError("view must be <W>x<H>", 1, value_column);
      }
      level.viewport_width = parse_positive(value.substr(0, x), 1, value_column);
      level.viewport_height = parse_positive(
          value.substr(x + 1), 1, value_column + static_cast<int>(x) + 1);
      has_view = true;
    } else {
      throw ParseError("unknown header key '" + std::string(key) + "'", 1,
                       column);
    }
    pos = end;
  }
}

}  // namespace detail

/// Parses level text: a header line `mode=<flat|platformer> cap=<int>
/// view=<W>x<H>` followed by equal-length grid rows. A missing view defaults
/// to the full level.
inline Level load_level(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ParseError("empty level", 1, 1);

  Level level;
  bool has_view = false;
  detail::parse_header(lines[0], level, has_view);
  if (level.episode_cap < 1) throw ParseError("cap must be >= 1", 1, 1);
  if (lines.size() < 2) throw ParseError("level has no rows", 2, 1);

  level.height = static_cast<int>(lines.size()) - 1;
  level.width = static_cast<int>(lines[1].size());
  if (level.width == 0) throw ParseError("empty grid row", 2, 1);
  level.cells.reserve(static_cast<std::size_t>(level.width) * level.height);
  int starts = 0;
  for (int r = 0; r < level.height; ++r) {
    const std::string_view row = lines[static_cast<std::size_t>(r) + 1];
    const int line_no = r + 2;
    if (static_cast<int>(row.size()) != level.width) {
      throw ParseError("row length " + std::to_string(row.size()) +
                           " differs from " + std::to_string(level.width),
                       line_no,
                       static_cast<int>(std::min<std::size_t>(
                           row.size(), level.width)) + 1);
    }
    for (int c = 0; c < level.width; ++c) {
      CellKind kind;
      if (!detail::parse_cell(row[c], kind)) {
        throw ParseError(std::string("unknown cell character '") + row[c] + "'",
                         line_no, c + 1);
      }
      if (kind == CellKind::kStart) {
        if (++starts > 1) throw ParseError("duplicate start", line_no, c + 1);
        level.start = {c, r};
      }
      level.cells.push_back(kind);
    }
  }
  if (starts == 0) throw ParseError("no start cell 'S'", 2, 1);
  if (!has_view) {
    level.viewport_width = level.width;
    level.viewport_height = level.height;
  }
  if (level.viewport_width < 1 || level.viewport_height < 1 ||
      level.viewport_width > level.width ||
      level.viewport_height > level.height) {
    throw ParseError("viewport must fit inside the level", 1, 1);
  }
  return level;
}

inline std::string serialize_level(const Level& level) {
  std::ostringstream out;
  out << "mode=" << (level.mode == PhysicsMode::kFlat ? "flat" : "platformer")
      << " cap=" << level.episode_cap << " view=" << level.viewport_width
      << 'x' << level.viewport_height << '\n';
  for (int r = 0; r < level.height; ++r) {
    for (int c = 0; c < level.width; ++c) out << detail::cell_char(level.at(c, r));
    out << '\n';
  }
  return out.str();
}

inline Level load_level_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open level file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return load_level(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), e.line(), e.column(), path.string());
  }
}

}  // namespace qmaplab

#endif  // QMAPLAB_ENV_LEVEL_HPP_
