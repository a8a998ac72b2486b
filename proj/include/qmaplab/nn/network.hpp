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

#ifndef QMAPLAB_NN_NETWORK_HPP_
#define QMAPLAB_NN_NETWORK_HPP_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qmaplab/core/binary_io.hpp"
#include "qmaplab/core/errors.hpp"
#include "qmaplab/core/random.hpp"
#include "qmaplab/nn/layers.hpp"

namespace qmaplab::nn {

using Layer = std::variant<Conv2D, ConvTranspose2D, Dense, Activation, DuelingHead>;

/// Feed-forward chain of layers over one flat parameter vector. Copying a
/// network copies its parameters, which is how target networks are synced.
template <typename T>
class Network {
 public:
  /// Activations of one forward pass, kept for backward().
  struct Tape {
    std::vector<std::vector<T>> acts;  // acts[0] is the input
  };

  struct NamedBlob {
    std::string name;
    std::size_t offset;
    std::size_t count;
  };

  Network() = default;
  Network(Shape input, std::vector<Layer> layers)
      : input_(input), output_(input), layers_(std::move(layers)) {
    std::size_t total = 0;
    for (auto& layer : layers_) {
      std::visit(
          [&](auto& l) {
            if (!(l.in == output_) && l.in.size() != output_.size()) {
              throw ConfigError("layer input " + to_string(l.in) +
                                " does not match " + to_string(output_));
            }
            l.offset = total;
            total += l.param_count();
            output_ = l.out;
          },
          layer);
    }
    params_.assign(total, T(0));
  }

  const Shape& input_shape() const { return input_; }
  const Shape& output_shape() const { return output_; }
  std::size_t param_count() const { return params_.size(); }
  std::span<T> params() { return params_; }
  std::span<const T> params() const { return params_; }
  const std::vector<Layer>& layers() const { return layers_; }

  void init(Rng& rng) {
    for (const auto& layer : layers_) {
      std::visit([&](const auto& l) { l.template init<T>(params_.data() + l.offset, rng); },
                 layer);
    }
  }

  std::vector<T> forward(std::span<const T> x) const {
    Tape tape;
    forward(x, tape);
    return std::move(tape.acts.back());
  }

  std::span<const T> forward(std::span<const T> x, Tape& tape) const {
    check_input(x.size());
    tape.acts.resize(layers_.size() + 1);
    tape.acts[0].assign(x.begin(), x.end());
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      std::visit(
          [&](const auto& l) {
            tape.acts[i + 1].resize(l.out.size());
            l.template forward<T>(params_.data() + l.offset, tape.acts[i].data(),
                                  tape.acts[i + 1].data());
          },
          layers_[i]);
    }
    return tape.acts.back();
  }

  /// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(output).
  void backward(const Tape& tape, std::span<const T> grad_out,
                std::span<T> grad) const {
    if (grad.size() != params_.size()) throw ConfigError("gradient size mismatch");
    std::vector<T> g(grad_out.begin(), grad_out.end());
    std::vector<T> g_in;
    for (std::size_t i = layers_.size(); i-- > 0;) {
      std::visit(
          [&](const auto& l) {
            g_in.resize(l.in.size());
            l.template backward<T>(params_.data() + l.offset, tape.acts[i].data(),
                                   tape.acts[i + 1].data(), g.data(),
                                   i > 0 ? g_in.data() : nullptr,
                                   grad.data() + l.offset);
          },
          layers_[i]);
      std::swap(g, g_in);
    }
  }

  std::vector<NamedBlob> named_blobs() const {
    std::vector<NamedBlob> out;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      std::visit(
          [&](const auto& l) {
            if (l.param_count() == 0) return;
            out.push_back({std::to_string(i) + "." + l.kind(), l.offset,
                           l.param_count()});
          },
          layers_[i]);
    }
    return out;
  }

  // Checkpoint: "QMNN" magic, version, blob count, then (name, float32 blob)
  // pairs, little-endian.
  void save(std::ostream& out) const {
    io::write_magic(out, "QMNN", 1);
    const auto blobs = named_blobs();
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(blobs.size()));
    for (const auto& b : blobs) {
      io::write_string(out, b.name);
      io::write_floats<T>(out, std::span<const T>(params_).subspan(b.offset, b.count));
    }
  }

  void load(std::istream& in) {
    io::expect_magic(in, "QMNN", 1);
    const auto blobs = named_blobs();
    const auto n = io::read_le<std::uint32_t>(in);
    if (n != blobs.size()) throw IoError("checkpoint layer count mismatch");
    for (const auto& b : blobs) {
      const std::string name = io::read_string(in);
      if (name != b.name) throw IoError("checkpoint blob '" + name + "' where '" + b.name + "' expected");
      io::read_floats<T>(in, std::span<T>(params_).subspan(b.offset, b.count));
    }
  }

 private:
  void check_input(std::size_t n) const {
    if (n != input_.size()) {
      throw ConfigError("network input has " + std::to_string(n) +
                        " values, expected " + to_string(input_));
    }
  }

  Shape input_;
  Shape output_;
  std::vector<Layer> layers_;
  std::vector<T> params_;
};

/// Builds a layer chain while tracking the running shape.
class NetworkBuilder {
 public:
  explicit NetworkBuilder(Shape input) : input_(input), shape_(input) {}

  NetworkBuilder& conv(int out_c, int kernel, int stride, int pad = 0) {
    return conv(out_c, kernel, kernel, stride, pad, pad);
  }

  NetworkBuilder& conv(int out_c, int kh, int kw, int stride, int pad_h, int pad_w) {
    Conv2D l;
    l.in = shape_;
    l.kh = kh;
    l.kw = kw;
    l.stride = stride;
    l.pad_h = pad_h;
    l.pad_w = pad_w;
    const int oh = (shape_.h + 2 * pad_h - kh) / stride + 1;
    const int ow = (shape_.w + 2 * pad_w - kw) / stride + 1;
    if (stride < 1 || shape_.h + 2 * pad_h < kh || shape_.w + 2 * pad_w < kw) {
      throw ConfigError("convolution kernel larger than input " + to_string(shape_));
    }
    l.out = {out_c, oh, ow};
    return push(l);
  }

  /// Transposed convolution producing exactly out_h x out_w; the full output
  /// is cropped symmetrically (extra row/column dropped at the end).
  NetworkBuilder& conv_transpose(int out_c, int kernel, int stride, int out_h,
                                 int out_w) {
    ConvTranspose2D l;
    l.in = shape_;
    l.kh = kernel;
    l.kw = kernel;
    l.stride = stride;
    const int full_h = (shape_.h - 1) * stride + kernel;
    const int full_w = (shape_.w - 1) * stride + kernel;
    if (stride < 1 || out_h > full_h || out_w > full_w || out_h < 1 || out_w < 1) {
      throw ConfigError("transposed convolution cannot produce " +
                        std::to_string(out_h) + "x" + std::to_string(out_w) +
                        " from " + to_string(shape_));
    }
    l.crop_h = (full_h - out_h) / 2;
    l.crop_w = (full_w - out_w) / 2;
    l.out = {out_c, out_h, out_w};
    return push(l);
  }

  NetworkBuilder& dense(int n) {
    Dense l;
    l.in = shape_;
    l.out = {n, 1, 1};
    return push(l);
  }

  NetworkBuilder& relu() { return activation(ActivationKind::kRelu); }
  NetworkBuilder& elu() { return activation(ActivationKind::kElu); }

  NetworkBuilder& dueling(int actions) {
    DuelingHead l;
    l.in = shape_;
    l.out = {actions, 1, 1};
    return push(l);
  }

  /// Reinterprets the current activations with a new shape of equal size.
  NetworkBuilder& reshape(Shape s) {
    if (s.size() != shape_.size()) {
      throw ConfigError("cannot reshape " + to_string(shape_) + " to " + to_string(s));
    }
    shape_ = s;
    return *this;
  }

  const Shape& shape() const { return shape_; }

  template <typename T>
  Network<T> build() const {
    return Network<T>(input_, layers_);
  }

 private:
  NetworkBuilder& activation(ActivationKind fn) {
    Activation l;
    l.in = shape_;
    l.out = shape_;
    l.fn = fn;
    return push(l);
  }

  template <typename L>
  NetworkBuilder& push(L l) {
    layers_.emplace_back(l);
    shape_ = l.out;
    return *this;
  }

  Shape input_;
  Shape shape_;
  std::vector<Layer> layers_;
};

/// Adam with the usual bias correction.
template <typename T>
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

  double learning_rate() const { return lr_; }
  long steps() const { return t_; }

  void step(std::span<T> params, std::span<const T> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size()) {
      throw ConfigError("optimizer size mismatch");
    }
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    const double step = lr_ * std::sqrt(c2) / c1;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double g = static_cast<double>(grad[i]);
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
      params[i] -= static_cast<T>(step * m_[i] / (std::sqrt(v_[i]) + eps_));
    }
  }

 private:
  double lr_ = 1e-4;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace qmaplab::nn

#endif  // QMAPLAB_NN_NETWORK_HPP_
