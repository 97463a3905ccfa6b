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

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "seqisp/image.hpp"

namespace seqisp {

struct DegradationParams {
  double gain = 1.0;                   // [0.125, 0.5]
  std::array<double, 3> cast{1, 1, 1};  // [0.7, 1.3] each, then mean-normalized
  double exponent = 1.0;               // [1.2, 2.0]
};

struct Sample {
  Image input;
  Image target;
};

struct SynthPair {
  Image input;
  Image target;
  DegradationParams params;
};

/// Degrades `target` into clamp01(gain * cast * target) ^ exponent.
Image degrade(const Image& target, const DegradationParams& params);

/// Procedural clean image plus its degraded version, fully determined by
/// (seed, index).
SynthPair generate_pair(std::uint64_t seed, std::uint64_t index, std::size_t size);

struct Dataset {
  std::vector<Sample> train;
  std::vector<Sample> eval;
};

/// Train pairs use indices [0, n_train), eval pairs [n_train, n_train + n_eval).
Dataset make_dataset(std::uint64_t seed, std::size_t n_train, std::size_t n_eval,
                     std::size_t size);

/// Writes NNNN_input.ppm / NNNN_target.ppm under dir/train and dir/eval.
void save_dataset(const Dataset& data, const std::filesystem::path& dir);
/// Reads a directory written by save_dataset().
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace seqisp
