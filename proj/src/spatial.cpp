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

// Spatial kernels: 3x3 blur and non-local means. Both use replicate padding.

#include <algorithm>
#include <cmath>
#include <vector>

#include "seqisp/kernels.hpp"

namespace seqisp {

namespace {

constexpr int kSearchRadius = 3;  // 7x7 window
constexpr int kPatchRadius = 1;   // 3x3 patch
constexpr int kWindow = 2 * kSearchRadius + 1;
constexpr int kOffsets = kWindow * kWindow;

long clampi(long v, long hi) { return std::clamp(v, 0L, hi - 1); }

// Squared patch distances for every pixel and window offset, laid out
// [pixel][offset]. Independent of the filter strength, so the denoise
// finite difference reuses it.
std::vector<double> patch_distances(const Image& img) {
  const auto h = static_cast<long>(img.height());
  const auto w = static_cast<long>(img.width());
  std::vector<double> dist(img.pixels() * kOffsets);
  constexpr double norm = 1.0 / (3.0 * (2 * kPatchRadius + 1) * (2 * kPatchRadius + 1));
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      double* row = dist.data() + (y * w + x) * kOffsets;
      int o = 0;
      for (int oy = -kSearchRadius; oy <= kSearchRadius; ++oy) {
        for (int ox = -kSearchRadius; ox <= kSearchRadius; ++ox, ++o) {
          double acc = 0.0;
          for (int py = -kPatchRadius; py <= kPatchRadius; ++py) {
            const long ay = clampi(y + py, h);
            const long by = clampi(y + oy + py, h);
            for (int px = -kPatchRadius; px <= kPatchRadius; ++px) {
              const long ax = clampi(x + px, w);
              const long bx = clampi(x + ox + px, w);
              for (int c = 0; c < 3; ++c) {
                const double d = img.at(ay, ax, c) - img.at(by, bx, c);
                acc += d * d;
              }
            }
          }
          row[o] = acc * norm;
        }
      }
    }
  }
  return dist;
}

// Normalized weights for one pixel; returns them in `weights`.
void pixel_weights(const double* dist, double inv_h2, double* weights) {
  double total = 0.0;
  for (int o = 0; o < kOffsets; ++o) {
    weights[o] = std::exp(-dist[o] * inv_h2);
    total += weights[o];
  }
  // The centre offset has distance 0, so total >= 1.
  for (int o = 0; o < kOffsets; ++o) weights[o] /= total;
}

Image nlm_with_distances(const Image& img, const std::vector<double>& dist, double strength) {
  const auto h = static_cast<long>(img.height());
  const auto w = static_cast<long>(img.width());
  const double inv_h2 = 1.0 / (strength * strength);
  Image out(img.height(), img.width());
  double weights[kOffsets];
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      pixel_weights(dist.data() + (y * w + x) * kOffsets, inv_h2, weights);
      double acc[3] = {0.0, 0.0, 0.0};
      int o = 0;
      for (int oy = -kSearchRadius; oy <= kSearchRadius; ++oy) {
        const long sy = clampi(y + oy, h);
        for (int ox = -kSearchRadius; ox <= kSearchRadius; ++ox, ++o) {
          const long sx = clampi(x + ox, w);
          for (int c = 0; c < 3; ++c) acc[c] += weights[o] * img.at(sy, sx, c);
        }
      }
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = acc[c];
    }
  }
  return out;
}

}  // namespace

Image blur3x3(const Image& img) {
  const auto h = static_cast<long>(img.height());
  const auto w = static_cast<long>(img.width());
  Image out(img.height(), img.width());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int dy = -1; dy <= 1; ++dy) {
          const long sy = clampi(y + dy, h);
          for (int dx = -1; dx <= 1; ++dx) {
            acc += kBlurKernel[(dy + 1) * 3 + (dx + 1)] * img.at(sy, clampi(x + dx, w), c);
          }
        }
        out.at(y, x, c) = acc;
      }
    }
  }
  return out;
}

Image nonlocal_means(const Image& img, double strength) {
  return nlm_with_distances(img, patch_distances(img), strength);
}

KernelGradients denoise_vjp_impl(const Image& img, double raw, double fd_step,
                                  const Image& up) {
  const auto h = static_cast<long>(img.height());
  const auto w = static_cast<long>(img.width());
  const std::vector<double> dist = patch_distances(img);
  const double strength = rescale::denoise(raw);

  KernelGradients g{Image(img.height(), img.width()), {0.0}};
  const double inv_h2 = 1.0 / (strength * strength);
  double weights[kOffsets];
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      pixel_weights(dist.data() + (y * w + x) * kOffsets, inv_h2, weights);
      int o = 0;
      for (int oy = -kSearchRadius; oy <= kSearchRadius; ++oy) {
        const long sy = clampi(y + oy, h);
        for (int ox = -kSearchRadius; ox <= kSearchRadius; ++ox, ++o) {
          const long sx = clampi(x + ox, w);
          for (int c = 0; c < 3; ++c) g.d_input.at(sy, sx, c) += weights[o] * up.at(y, x, c);
        }
      }
    }
  }

  const double lo = std::max(0.0, raw - fd_step);
  const double hi = std::min(1.0, raw + fd_step);
  const Image plus = nlm_with_distances(img, dist, rescale::denoise(hi));
  const Image minus = nlm_with_distances(img, dist, rescale::denoise(lo));
  double acc = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) acc += up[i] * (plus[i] - minus[i]);
  g.d_params[0] = acc / (hi - lo);
  return g;
}

}  // namespace seqisp
