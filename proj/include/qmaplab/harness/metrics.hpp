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

#ifndef QMAPLAB_HARNESS_METRICS_HPP_
#define QMAPLAB_HARNESS_METRICS_HPP_

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qmaplab/core/errors.hpp"
#include "qmaplab/env/level.hpp"
#include "qmaplab/explore/policy.hpp"

namespace qmaplab {

/// Plain-text portable graymap.
struct GrayImage {
  int width = 0;
  int height = 0;
  int max_value = 255;
  std::vector<int> pixels;  // row-major
  std::string comment;

  GrayImage() = default;
  GrayImage(int w, int h, int maxval) : width(w), height(h), max_value(maxval),
      pixels(static_cast<std::size_t>(w) * h, 0) {}

  int& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  int at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

inline void write_pgm(std::ostream& out, const GrayImage& img) {
  out << "P2\n";
  if (!img.comment.empty()) out << "# " << img.comment << "\n";
  out << img.width << " " << img.height << "\n" << img.max_value << "\n";
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (x) out << ' ';
      out << img.at(x, y);
    }
    out << '\n';
  }
}

inline GrayImage read_pgm(std::istream& in) {
  std::string magic;
  if (!(in >> magic) || magic != "P2") throw ParseError("expected P2 graymap", 1, 1);
  GrayImage img;
  auto next_int = [&in, &img](const char* what) {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
      if (img.comment.empty() && comment.size() > 1) {
        img.comment = comment.substr(comment.rfind("# ", 0) == 0 ? 2 : 1);
      }
      in >> std::ws;
    }
    long v;
    if (!(in >> v)) throw ParseError(std::string("missing ") + what, 0, 0);
    return v;
  };
  const long w = next_int("width");
  const long h = next_int("height");
  const long maxval = next_int("maxval");
  if (w < 0 || h < 0 || w > 1 << 16 || h > 1 << 16 || maxval <= 0 || maxval > 65535) {
    throw ParseError("bad graymap header", 0, 0);
  }
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.max_value = static_cast<int>(maxval);
  img.pixels.resize(static_cast<std::size_t>(w * h));
  for (auto& p : img.pixels) {
    const long v = next_int("pixel");
    if (v < 0 || v > maxval) throw ParseError("pixel out of range", 0, 0);
    p = static_cast<int>(v);
  }
  return img;
}

/// Binary grid of world cells the agent has occupied.
class VisitationMask {
 public:
  VisitationMask() = default;
  VisitationMask(int width, int height)
      : width_(width), height_(height),
        bits_(static_cast<std::size_t>(width) * height, 0) {
    if (width <= 0 || height <= 0) throw ContractError("mask dimensions must be positive");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  long steps() const { return steps_; }
  void set_steps(long s) { steps_ = s; }

  bool visited(int col, int row) const {
    return bits_[static_cast<std::size_t>(row) * width_ + col] != 0;
  }

  void visit(CellPos p) {
    if (p.col < 0 || p.row < 0 || p.col >= width_ || p.row >= height_) {
      throw ContractError("visit outside the mask");
    }
    auto& b = bits_[static_cast<std::size_t>(p.row) * width_ + p.col];
    if (!b) {
      b = 1;
      ++count_;
      rightmost_ = std::max(rightmost_, p.col);
    }
  }

  long count() const { return count_; }
  /// -1 when nothing was visited.
  int rightmost() const { return rightmost_; }

  void merge(const VisitationMask& other) {
    if (other.width_ != width_ || other.height_ != height_) {
      throw ContractError("mask dimensions differ");
    }
    for (int r = 0; r < height_; ++r) {
      for (int c = 0; c < width_; ++c) {
        if (other.visited(c, r)) visit({c, r});
      }
    }
    steps_ = std::max(steps_, other.steps_);
  }

  GrayImage to_image() const {
    GrayImage img(width_, height_, 1);
    img.comment = "steps " + std::to_string(steps_);
    for (int r = 0; r < height_; ++r) {
      for (int c = 0; c < width_; ++c) img.at(c, r) = visited(c, r) ? 1 : 0;
    }
    return img;
  }

  static VisitationMask from_image(const GrayImage& img) {
    VisitationMask m(img.width, img.height);
    for (int r = 0; r < img.height; ++r) {
      for (int c = 0; c < img.width; ++c) {
        if (img.at(c, r) != 0) m.visit({c, r});
      }
    }
    if (img.comment.rfind("steps ", 0) == 0) {
      m.steps_ = std::stol(img.comment.substr(6));
    }
    return m;
  }

  bool operator==(const VisitationMask& o) const {
    return width_ == o.width_ && height_ == o.height_ && steps_ == o.steps_ &&
           bits_ == o.bits_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  long steps_ = 0;
  long count_ = 0;
  int rightmost_ = -1;
  std::vector<std::uint8_t> bits_;
};

/// Two masks on one image: 0 neither, 1 first only, 2 second only, 3 both.
inline GrayImage overlay_masks(const VisitationMask& first, const VisitationMask& second) {
  if (first.width() != second.width() || first.height() != second.height()) {
    throw ContractError("mask dimensions differ");
  }
  GrayImage img(first.width(), first.height(), 3);
  img.comment = "0 none, 1 first, 2 second, 3 both";
  for (int r = 0; r < first.height(); ++r) {
    for (int c = 0; c < first.width(); ++c) {
      img.at(c, r) = (first.visited(c, r) ? 1 : 0) + (second.visited(c, r) ? 2 : 0);
    }
  }
  return img;
}

struct MetricsRow {
  long step = 0;
  long episode = 0;
  double episode_return = 0.0;
  long flags_reached_cumulative = 0;
  long unique_cells_visited = 0;
  double exploratory_proportion_ema = 0.0;
  double p_goal = 0.0;
  double qmap_loss = 0.0;
  double dqn_loss = 0.0;

  bool operator==(const MetricsRow&) const = default;
};

inline constexpr const char* kMetricsHeader =
    "step,episode,episode_return,flags_reached_cumulative,unique_cells_visited,"
    "exploratory_proportion_ema,p_goal,qmap_loss,dqn_loss";

namespace metrics_detail {
inline std::string fmt(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(9);
  out << v;
  return out.str();
}
}  // namespace metrics_detail

inline void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  using metrics_detail::fmt;
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    out << r.step << ',' << r.episode << ',' << fmt(r.episode_return) << ','
        << r.flags_reached_cumulative << ',' << r.unique_cells_visited << ','
        << fmt(r.exploratory_proportion_ema) << ',' << fmt(r.p_goal) << ','
        << fmt(r.qmap_loss) << ',' << fmt(r.dqn_loss) << '\n';
  }
}

inline std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw ParseError("unexpected metrics header", 1, 1);
  }
  std::vector<MetricsRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    MetricsRow r;
    char c1, c2, c3, c4, c5, c6, c7, c8;
    if (!(fields >> r.step >> c1 >> r.episode >> c2 >> r.episode_return >> c3 >>
          r.flags_reached_cumulative >> c4 >> r.unique_cells_visited >> c5 >>
          r.exploratory_proportion_ema >> c6 >> r.p_goal >> c7 >> r.qmap_loss >> c8 >>
          r.dqn_loss)) {
      throw ParseError("malformed metrics row", line_no, 1);
    }
    rows.push_back(r);
  }
  return rows;
}

/// One audited action choice.
struct DecisionRecord {
  long step = 0;
  Action action = Action::kNoop;
  DecisionSource source = DecisionSource::kRandom;
  unsigned events = 0;
  int goal_x = -1;
  int goal_y = -1;
  int budget = -1;  // remaining T after the decision, -1 without a goal
  double p_goal = 0.0;
  double ema = 0.0;
  double eps_scheduled = 0.0;

  bool operator==(const DecisionRecord&) const = default;
};

inline void write_decision_csv(std::ostream& out, const std::vector<DecisionRecord>& log) {
  using metrics_detail::fmt;
  out << "step,source,action,goal_x,goal_y,budget,p_goal,ema\n";
  for (const auto& d : log) {
    out << d.step << ',' << source_name(d.source) << ',' << action_name(d.action) << ','
        << d.goal_x << ',' << d.goal_y << ',' << d.budget << ',' << fmt(d.p_goal) << ','
        << fmt(d.ema) << '\n';
  }
}

}  // namespace qmaplab

#endif  // QMAPLAB_HARNESS_METRICS_HPP_
