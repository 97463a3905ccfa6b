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

#include "seqisp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "seqisp/error.hpp"
#include "seqisp/rng.hpp"

namespace seqisp {

namespace {

Rgb random_color(Rng& rng) {
  return {rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
}

Image procedural_target(Rng& rng, std::size_t size) {
  const double n = static_cast<double>(size);
  Image img(size, size);
  std::vector<double> weight_sum(size * size, 0.0);

  // Weighted mix of linear gradients. Each ramps between two colors along a
  // random direction across the image.
  const int gradients = 2 + static_cast<int>(rng.below(4));
  for (int g = 0; g < gradients; ++g) {
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double dx = std::cos(angle), dy = std::sin(angle);
    const Rgb c0 = random_color(rng), c1 = random_color(rng);
    const double weight = rng.uniform(0.2, 1.0);
    // Project the corners to normalize the ramp to [0, 1].
    double lo = 0.0, hi = 0.0;
    for (double cy : {0.0, 1.0}) {
      for (double cx : {0.0, 1.0}) {
        const double p = cx * dx + cy * dy;
        lo = std::min(lo, p);
        hi = std::max(hi, p);
      }
    }
    for (std::size_t y = 0; y < size; ++y) {
      for (std::size_t x = 0; x < size; ++x) {
        const double u = (static_cast<double>(x) + 0.5) / n;
        const double v = (static_cast<double>(y) + 0.5) / n;
        const double s = (u * dx + v * dy - lo) / (hi - lo);
        for (std::size_t c = 0; c < 3; ++c) {
          img.at(y, x, c) += weight * (c0[c] + (c1[c] - c0[c]) * s);
        }
        weight_sum[y * size + x] += weight;
      }
    }
  }
  for (std::size_t i = 0; i < size * size; ++i) {
    for (std::size_t c = 0; c < 3; ++c) img[3 * i + c] /= weight_sum[i];
  }

  // Alpha-composited rectangles and discs.
  const int shapes = 1 + static_cast<int>(rng.below(4));
  for (int s = 0; s < shapes; ++s) {
    const bool disc = rng.below(2) == 1;
    const Rgb color = random_color(rng);
    const double alpha = rng.uniform(0.4, 1.0);
    const double cx = rng.uniform(0.1, 0.9), cy = rng.uniform(0.1, 0.9);
    const double rx = rng.uniform(0.08, 0.3), ry = rng.uniform(0.08, 0.3);
    for (std::size_t y = 0; y < size; ++y) {
      for (std::size_t x = 0; x < size; ++x) {
        const double u = (static_cast<double>(x) + 0.5) / n - cx;
        const double v = (static_cast<double>(y) + 0.5) / n - cy;
        const bool inside = disc ? (u * u + v * v <= rx * rx)
                                 : (std::abs(u) <= rx && std::abs(v) <= ry);
        if (!inside) continue;
        for (std::size_t c = 0; c < 3; ++c) {
          double& p = img.at(y, x, c);
          p = (1.0 - alpha) * p + alpha * color[c];
        }
      }
    }
  }
  for (auto& v : img.data()) v = std::clamp(v, 0.05, 0.95);
  return img;
}

}  // namespace

Image degrade(const Image& target, const DegradationParams& params) {
  Image out = target;
  for (std::size_t i = 0; i < target.pixels(); ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      const double v = std::clamp(params.gain * params.cast[c] * target[3 * i + c], 0.0, 1.0);
      out[3 * i + c] = std::pow(v, params.exponent);
    }
  }
  return out;
}

SynthPair generate_pair(std::uint64_t seed, std::uint64_t index, std::size_t size) {
  if (size < 8) throw InvalidArgument("synthetic image size must be at least 8");
  Rng rng(derive_seed(seed, index, 0x5e17));
  SynthPair pair;
  pair.target = procedural_target(rng, size);

  DegradationParams& p = pair.params;
  p.gain = rng.uniform(0.125, 0.5);
  double mean = 0.0;
  for (auto& c : p.cast) {
    c = rng.uniform(0.7, 1.3);
    mean += c / 3.0;
  }
  for (auto& c : p.cast) c /= mean;
  p.exponent = rng.uniform(1.2, 2.0);
  pair.input = degrade(pair.target, p);
  return pair;
}

Dataset make_dataset(std::uint64_t seed, std::size_t n_train, std::size_t n_eval,
                     std::size_t size) {
  Dataset d;
  d.train.reserve(n_train);
  d.eval.reserve(n_eval);
  for (std::size_t i = 0; i < n_train + n_eval; ++i) {
    SynthPair pair = generate_pair(seed, i, size);
    auto& dst = i < n_train ? d.train : d.eval;
    dst.push_back({std::move(pair.input), std::move(pair.target)});
  }
  return d;
}

namespace {

std::string pair_stem(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return buf;
}

void save_split(const std::vector<Sample>& split, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < split.size(); ++i) {
    save_ppm(split[i].input, dir / (pair_stem(i) + "_input.ppm"));
    save_ppm(split[i].target, dir / (pair_stem(i) + "_target.ppm"));
  }
}

std::vector<Sample> load_split(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("dataset directory " + dir.string() + " does not exist");
  }
  std::vector<Sample> split;
  for (std::size_t i = 0;; ++i) {
    const auto in = dir / (pair_stem(i) + "_input.ppm");
    const auto tg = dir / (pair_stem(i) + "_target.ppm");
    if (!std::filesystem::exists(in)) break;
    Sample s{load_ppm(in), load_ppm(tg)};
    if (!s.input.same_shape(s.target)) {
      throw FormatError("input and target differ in size: " + in.string());
    }
    split.push_back(std::move(s));
  }
  return split;
}

}  // namespace

void save_dataset(const Dataset& data, const std::filesystem::path& dir) {
  save_split(data.train, dir / "train");
  save_split(data.eval, dir / "eval");
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset d{load_split(dir / "train"), load_split(dir / "eval")};
  if (d.train.empty()) throw FormatError("no training pairs found under " + dir.string());
  if (d.eval.empty()) throw FormatError("no eval pairs found under " + dir.string());
  return d;
}

}  // namespace seqisp
