/* Copyright 2026 The seqisp Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

// Shared helpers for the test binaries: seeded random images, a
// central-difference gradient oracle and independent reference filters.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "seqisp/image.hpp"
#include "seqisp/rng.hpp"

namespace seqisp::testing {

inline Image random_image(std::uint64_t seed, std::size_t h, std::size_t w, double lo = 0.05,
                          double hi = 0.95) {
  Rng rng(seed);
  Image img(h, w);
  for (auto& v : img.data()) v = rng.uniform(lo, hi);
  return img;
}

inline double rel_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// Central difference of f with respect to x[i]; x is restored afterwards.
inline double central_diff(const std::function<double()>& f, double& x, double step) {
  const double saved = x;
  x = saved + step;
  const double up = f();
  x = saved - step;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * step);
}

/// Dot product of two equally sized images.
inline double dot(const Image& a, const Image& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

/// Straightforward non-local means written independently of the library:
/// clamped-coordinate lookups instead of a padded copy.
inline Image reference_nlm(const Image& img, double h) {
  const long H = static_cast<long>(img.height()), W = static_cast<long>(img.width());
  auto px = [&](long y, long x, std::size_t c) {
    y = std::clamp(y, 0L, H - 1);
    x = std::clamp(x, 0L, W - 1);
    return img.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x), c);
  };
  Image out(img.height(), img.width());
  for (long y = 0; y < H; ++y) {
    for (long x = 0; x < W; ++x) {
      double acc[3] = {0, 0, 0}, norm = 0.0;
      for (long dy = -3; dy <= 3; ++dy) {
        for (long dx = -3; dx <= 3; ++dx) {
          double d2 = 0.0;
          for (long py = -1; py <= 1; ++py) {
            for (long pxo = -1; pxo <= 1; ++pxo) {
              for (std::size_t c = 0; c < 3; ++c) {
                const double a = px(y + py, x + pxo, c);
                const double b = px(y + dy + py, x + dx + pxo, c);
                d2 += (a - b) * (a - b);
              }
            }
          }
          d2 /= 27.0;
          const double wgt = std::exp(-d2 / (h * h));
          norm += wgt;
          for (std::size_t c = 0; c < 3; ++c) acc[c] += wgt * px(y + dy, x + dx, c);
        }
      }
      for (std::size_t c = 0; c < 3; ++c) {
        out.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x), c) = acc[c] / norm;
      }
    }
  }
  return out;
}

/// 3x3 convolution with replicate padding, kernel given row-major.
inline Image reference_conv3x3(const Image& img, const double (&k)[9]) {
  const long H = static_cast<long>(img.height()), W = static_cast<long>(img.width());
  Image out(img.height(), img.width());
  for (long y = 0; y < H; ++y) {
    for (long x = 0; x < W; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (long dy = -1; dy <= 1; ++dy) {
          for (long dx = -1; dx <= 1; ++dx) {
            const long yy = std::clamp(y + dy, 0L, H - 1), xx = std::clamp(x + dx, 0L, W - 1);
            acc += k[(dy + 1) * 3 + (dx + 1)] *
                   img.at(static_cast<std::size_t>(yy), static_cast<std::size_t>(xx), c);
          }
        }
        out.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x), c) = acc;
      }
    }
  }
  return out;
}

}  // namespace seqisp::testing
