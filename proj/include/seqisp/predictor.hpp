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

#include <cstdint>
#include <vector>

#include "seqisp/image.hpp"
#include "seqisp/pipeline.hpp"
#include "seqisp/tensor.hpp"

namespace seqisp {

struct PredictorConfig {
  std::size_t channels = 16;    // C; stages produce C, 2C, 4C maps
  std::size_t latent = 64;      // D
  std::size_t head_hidden = 256;
  std::size_t input_size = 64;  // adaptive-pool resolution
  double leaky_slope = 0.01;
};

/// Image-conditioned parameter predictor: adaptive average pool, three
/// stride-2 3x3 conv stages with leaky ReLU, global average + max pooling,
/// a two-layer head to the latent z, and a linear decoder to the 27 raw
/// parameters squashed into [0, 1] by (tanh + 1) / 2.
class ParamPredictor {
 public:
  enum Index : std::size_t {
    kConv1W = 0, kConv1B, kConv2W, kConv2B, kConv3W, kConv3B,
    kHead1W, kHead1B, kHead2W, kHead2B, kDecoderW, kDecoderB,
  };

  /// Seeded uniform(+-1/sqrt(fan_in)) init; the final decoder bias is zero.
  explicit ParamPredictor(std::uint64_t seed, const PredictorConfig& config = {});
  /// Every weight and bias zero.
  static ParamPredictor zeros(const PredictorConfig& config = {});
  /// Channel and layer widths are read off the tensor shapes; the pooling
  /// resolution is not recoverable from them and must be passed in.
  static ParamPredictor from_weights(ParamSet weights, std::size_t input_size = 64);

  const PredictorConfig& config() const { return config_; }
  ParamSet& weights() { return weights_; }
  const ParamSet& weights() const { return weights_; }

  /// Intermediate activations kept for the backward pass.
  struct Cache {
    std::vector<double> pooled;  // 3 x S x S
    std::vector<double> pre1, act1, pre2, act2, pre3, act3;
    std::vector<double> features;         // [avg(4C), max(4C)]
    std::vector<std::size_t> max_index;   // argmax cell per channel
    std::vector<double> head_pre, head_act, latent, decoded, output;
  };

  ParamVector predict(const Image& img) const;
  Cache forward(const Image& img) const;

  /// Gradient of <upstream, output> with respect to the weights, added to
  /// `grad`. When `d_image` is non-null it receives the gradient with
  /// respect to the input image.
  void backward(const Image& img, const Cache& cache, std::span<const double> upstream,
                ParamSet& grad, Image* d_image = nullptr) const;

 private:
  explicit ParamPredictor(const PredictorConfig& config);
  void allocate();
  std::size_t map_size(int stage) const;  // spatial size after stage (0 = pooled input)

  PredictorConfig config_;
  ParamSet weights_;
};

/// Average of each output cell's source rectangle, [floor(i H / S), ceil((i+1) H / S)).
/// Result is channel-major, 3 x size x size.
std::vector<double> adaptive_average_pool(const Image& img, std::size_t size);

}  // namespace seqisp
