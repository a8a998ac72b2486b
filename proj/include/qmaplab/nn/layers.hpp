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

#ifndef QMAPLAB_NN_LAYERS_HPP_
#define QMAPLAB_NN_LAYERS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "qmaplab/core/random.hpp"

namespace qmaplab::nn {

/// Channels x height x width, flattened channel-major.
struct Shape {
  int c = 1;
  int h = 1;
  int w = 1;
  std::size_t size() const { return static_cast<std::size_t>(c) * h * w; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

inline std::string to_string(const Shape& s) {
  return std::to_string(s.c) + "x" + std::to_string(s.h) + "x" +
         std::to_string(s.w);
}

namespace detail {

template <typename T>
void glorot_uniform(std::span<T> w, double fan_in, double fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (T& v : w) v = static_cast<T>((2.0 * uniform01(rng) - 1.0) * limit);
}

}  // namespace detail

// Every layer reads its parameters from a flat array starting at `offset`,
// weights first, then biases. backward() accumulates parameter gradients and
// overwrites the input gradient when one is requested.

struct Conv2D {
  Shape in, out;
  int kh = 1, kw = 1, stride = 1, pad_h = 0, pad_w = 0;
  std::size_t offset = 0;

  std::size_t weight_count() const {
    return static_cast<std::size_t>(out.c) * in.c * kh * kw;
  }
  std::size_t param_count() const { return weight_count() + out.c; }
  const char* kind() const { return "conv"; }

  std::size_t widx(int oc, int ic, int ky, int kx) const {
    return ((static_cast<std::size_t>(oc) * in.c + ic) * kh + ky) * kw + kx;
  }

  template <typename T>
  void init(T* p, Rng& rng) const {
    detail::glorot_uniform<T>({p, weight_count()}, double(in.c) * kh * kw,
                              double(out.c) * kh * kw, rng);
    for (int oc = 0; oc < out.c; ++oc) p[weight_count() + oc] = T(0);
  }

  template <typename T>
  void forward(const T* p, const T* x, T* y) const {
    const T* bias = p + weight_count();
    for (int oc = 0; oc < out.c; ++oc) {
      for (int oy = 0; oy < out.h; ++oy) {
        for (int ox = 0; ox < out.w; ++ox) {
          T sum = bias[oc];
          for (int ic = 0; ic < in.c; ++ic) {
            const T* xc = x + static_cast<std::size_t>(ic) * in.h * in.w;
            for (int ky = 0; ky < kh; ++ky) {
              const int iy = oy * stride + ky - pad_h;
              if (iy < 0 || iy >= in.h) continue;
              const T* wrow = p + widx(oc, ic, ky, 0);
              const T* xrow = xc + static_cast<std::size_t>(iy) * in.w;
              for (int kx = 0; kx < kw; ++kx) {
                const int ix = ox * stride + kx - pad_w;
                if (ix < 0 || ix >= in.w) continue;
                sum += wrow[kx] * xrow[ix];
              }
            }
          }
          y[(static_cast<std::size_t>(oc) * out.h + oy) * out.w + ox] = sum;
        }
      }
    }
  }

  template <typename T>
  void backward(const T* p, const T* x, const T* /*y*/, const T* gy, T* gx,
                T* gp) const {
    if (gx) std::fill(gx, gx + in.size(), T(0));
    T* gbias = gp + weight_count();
    for (int oc = 0; oc < out.c; ++oc) {
      for (int oy = 0; oy < out.h; ++oy) {
        for (int ox = 0; ox < out.w; ++ox) {
          const T g = gy[(static_cast<std::size_t>(oc) * out.h + oy) * out.w + ox];
          if (g == T(0)) continue;
          gbias[oc] += g;
          for (int ic = 0; ic < in.c; ++ic) {
            const std::size_t cbase = static_cast<std::size_t>(ic) * in.h * in.w;
            for (int ky = 0; ky < kh; ++ky) {
              const int iy = oy * stride + ky - pad_h;
              if (iy < 0 || iy >= in.h) continue;
              const std::size_t w0 = widx(oc, ic, ky, 0);
              const std::size_t x0 = cbase + static_cast<std::size_t>(iy) * in.w;
              for (int kx = 0; kx < kw; ++kx) {
                const int ix = ox * stride + kx - pad_w;
                if (ix < 0 || ix >= in.w) continue;
                gp[w0 + kx] += g * x[x0 + ix];
                if (gx) gx[x0 + ix] += g * p[w0 + kx];
              }
            }
          }
        }
      }
    }
  }
};

/// Transposed convolution. The full output ((in - 1) * stride + kernel) is
/// cropped to `out` starting at (crop_h, crop_w).
struct ConvTranspose2D {
  Shape in, out;
  int kh = 1, kw = 1, stride = 1, crop_h = 0, crop_w = 0;
  std::size_t offset = 0;

  std::size_t weight_count() const {
    return static_cast<std::size_t>(in.c) * out.c * kh * kw;
  }
  std::size_t param_count() const { return weight_count() + out.c; }
  const char* kind() const { return "deconv"; }

  std::size_t widx(int ic, int oc, int ky, int kx) const {
    return ((static_cast<std::size_t>(ic) * out.c + oc) * kh + ky) * kw + kx;
  }

  template <typename T>
  void init(T* p, Rng& rng) const {
    detail::glorot_uniform<T>({p, weight_count()}, double(in.c) * kh * kw,
                              double(out.c) * kh * kw, rng);
    for (int oc = 0; oc < out.c; ++oc) p[weight_count() + oc] = T(0);
  }

  template <typename T>
  void forward(const T* p, const T* x, T* y) const {
    const T* bias = p + weight_count();
    const std::size_t plane = static_cast<std::size_t>(out.h) * out.w;
    for (int oc = 0; oc < out.c; ++oc) {
      std::fill(y + oc * plane, y + (oc + 1) * plane, bias[oc]);
    }
    for (int ic = 0; ic < in.c; ++ic) {
      for (int iy = 0; iy < in.h; ++iy) {
        for (int ix = 0; ix < in.w; ++ix) {
          const T v = x[(static_cast<std::size_t>(ic) * in.h + iy) * in.w + ix];
          if (v == T(0)) continue;
          for (int oc = 0; oc < out.c; ++oc) {
            T* yc = y + oc * plane;
            for (int ky = 0; ky < kh; ++ky) {
              const int oy = iy * stride + ky - crop_h;
              if (oy < 0 || oy >= out.h) continue;
              const T* wrow = p + widx(ic, oc, ky, 0);
              T* yrow = yc + static_cast<std::size_t>(oy) * out.w;
              for (int kx = 0; kx < kw; ++kx) {
                const int ox = ix * stride + kx - crop_w;
                if (ox < 0 || ox >= out.w) continue;
                yrow[ox] += v * wrow[kx];
              }
            }
          }
        }
      }
    }
  }

  template <typename T>
  void backward(const T* p, const T* x, const T* /*y*/, const T* gy, T* gx,
                T* gp) const {
    const std::size_t plane = static_cast<std::size_t>(out.h) * out.w;
    T* gbias = gp + weight_count();
    for (int oc = 0; oc < out.c; ++oc) {
      for (std::size_t i = 0; i < plane; ++i) gbias[oc] += gy[oc * plane + i];
    }
    for (int ic = 0; ic < in.c; ++ic) {
      for (int iy = 0; iy < in.h; ++iy) {
        for (int ix = 0; ix < in.w; ++ix) {
          const std::size_t xi = (static_cast<std::size_t>(ic) * in.h + iy) * in.w + ix;
          const T v = x[xi];
          T acc = T(0);
          for (int oc = 0; oc < out.c; ++oc) {
            const T* gyc = gy + oc * plane;
            for (int ky = 0; ky < kh; ++ky) {
              const int oy = iy * stride + ky - crop_h;
              if (oy < 0 || oy >= out.h) continue;
              const std::size_t w0 = widx(ic, oc, ky, 0);
              const T* grow = gyc + static_cast<std::size_t>(oy) * out.w;
              for (int kx = 0; kx < kw; ++kx) {
                const int ox = ix * stride + kx - crop_w;
                if (ox < 0 || ox >= out.w) continue;
                gp[w0 + kx] += v * grow[ox];
                acc += p[w0 + kx] * grow[ox];
              }
            }
          }
          if (gx) gx[xi] = acc;
        }
      }
    }
  }
};

struct Dense {
  Shape in, out;  // treated as flat vectors
  std::size_t offset = 0;

  std::size_t n_in() const { return in.size(); }
  std::size_t n_out() const { return out.size(); }
  std::size_t weight_count() const { return n_in() * n_out(); }
  std::size_t param_count() const { return weight_count() + n_out(); }
  const char* kind() const { return "dense"; }

  template <typename T>
  void init(T* p, Rng& rng) const {
    detail::glorot_uniform<T>({p, weight_count()}, double(n_in()),
                              double(n_out()), rng);
    std::fill(p + weight_count(), p + param_count(), T(0));
  }

  template <typename T>
  void forward(const T* p, const T* x, T* y) const {
    const std::size_t ni = n_in();
    for (std::size_t o = 0; o < n_out(); ++o) {
      const T* wrow = p + o * ni;
      T sum = p[weight_count() + o];
      for (std::size_t i = 0; i < ni; ++i) sum += wrow[i] * x[i];
      y[o] = sum;
    }
  }

  template <typename T>
  void backward(const T* p, const T* x, const T* /*y*/, const T* gy, T* gx,
                T* gp) const {
    const std::size_t ni = n_in();
    if (gx) std::fill(gx, gx + ni, T(0));
    for (std::size_t o = 0; o < n_out(); ++o) {
      const T g = gy[o];
      gp[weight_count() + o] += g;
      if (g == T(0)) continue;
      const T* wrow = p + o * ni;
      T* grow = gp + o * ni;
      for (std::size_t i = 0; i < ni; ++i) {
        grow[i] += g * x[i];
        if (gx) gx[i] += g * wrow[i];
      }
    }
  }
};

enum class ActivationKind { kRelu, kElu };

struct Activation {
  Shape in, out;
  ActivationKind fn = ActivationKind::kRelu;
  std::size_t offset = 0;

  std::size_t param_count() const { return 0; }
  const char* kind() const { return fn == ActivationKind::kRelu ? "relu" : "elu"; }

  template <typename T>
  void init(T*, Rng&) const {}

  template <typename T>
  void forward(const T*, const T* x, T* y) const {
    const std::size_t n = in.size();
    if (fn == ActivationKind::kRelu) {
      for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = x[i] > T(0) ? x[i] : std::expm1(x[i]);
      }
    }
  }

  template <typename T>
  void backward(const T*, const T* x, const T* y, const T* gy, T* gx,
                T*) const {
    if (!gx) return;
    const std::size_t n = in.size();
    if (fn == ActivationKind::kRelu) {
      for (std::size_t i = 0; i < n; ++i) gx[i] = x[i] > T(0) ? gy[i] : T(0);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        gx[i] = x[i] > T(0) ? gy[i] : gy[i] * (y[i] + T(1));
      }
    }
  }
};

/// Q = V + A - mean(A), with V and A linear in the input.
struct DuelingHead {
  Shape in, out;  // out.size() == number of actions
  std::size_t offset = 0;

  std::size_t n_in() const { return in.size(); }
  std::size_t n_actions() const { return out.size(); }
  // Layout: value weights [n_in], value bias, advantage weights
  // [n_actions][n_in], advantage biases [n_actions].
  std::size_t value_bias() const { return n_in(); }
  std::size_t adv_weights() const { return n_in() + 1; }
  std::size_t adv_bias() const { return adv_weights() + n_actions() * n_in(); }
  std::size_t param_count() const { return adv_bias() + n_actions(); }
  const char* kind() const { return "dueling"; }

  template <typename T>
  void init(T* p, Rng& rng) const {
    detail::glorot_uniform<T>({p, n_in()}, double(n_in()), 1.0, rng);
    p[value_bias()] = T(0);
    detail::glorot_uniform<T>({p + adv_weights(), n_actions() * n_in()},
                              double(n_in()), double(n_actions()), rng);
    std::fill(p + adv_bias(), p + param_count(), T(0));
  }

  template <typename T>
  void forward(const T* p, const T* x, T* y) const {
    const std::size_t ni = n_in();
    T value = p[value_bias()];
    for (std::size_t i = 0; i < ni; ++i) value += p[i] * x[i];
    T mean = T(0);
    for (std::size_t a = 0; a < n_actions(); ++a) {
      const T* wrow = p + adv_weights() + a * ni;
      T adv = p[adv_bias() + a];
      for (std::size_t i = 0; i < ni; ++i) adv += wrow[i] * x[i];
      y[a] = adv;
      mean += adv;
    }
    mean /= static_cast<T>(n_actions());
    for (std::size_t a = 0; a < n_actions(); ++a) y[a] = value + y[a] - mean;
  }

  template <typename T>
  void backward(const T* p, const T* x, const T* /*y*/, const T* gy, T* gx,
                T* gp) const {
    const std::size_t ni = n_in();
    const std::size_t na = n_actions();
    T gsum = T(0);
    for (std::size_t a = 0; a < na; ++a) gsum += gy[a];
    const T gmean = gsum / static_cast<T>(na);
    if (gx) std::fill(gx, gx + ni, T(0));
    // dQ_a/dV = 1; dQ_a/dA_b = [a == b] - 1/na.
    gp[value_bias()] += gsum;
    for (std::size_t i = 0; i < ni; ++i) {
      gp[i] += gsum * x[i];
      if (gx) gx[i] += gsum * p[i];
    }
    for (std::size_t b = 0; b < na; ++b) {
      const T gadv = gy[b] - gmean;
      gp[adv_bias() + b] += gadv;
      const T* wrow = p + adv_weights() + b * ni;
      T* grow = gp + adv_weights() + b * ni;
      for (std::size_t i = 0; i < ni; ++i) {
        grow[i] += gadv * x[i];
        if (gx) gx[i] += gadv * wrow[i];
      }
    }
  }
};

}  // namespace qmaplab::nn

#endif  // QMAPLAB_NN_LAYERS_HPP_
