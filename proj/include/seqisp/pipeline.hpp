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
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqisp/image.hpp"
#include "seqisp/kernels.hpp"

namespace seqisp {

/// Ordered, repetition-free list of modules in application order
/// (steps()[0] runs first).
class PipelineSequence {
 public:
  PipelineSequence() = default;
  /// Throws InvalidArgument on a repeated module or more than kNumModules steps.
  explicit PipelineSequence(std::vector<ModuleId> steps, bool terminated = true);
  PipelineSequence(std::initializer_list<ModuleId> steps)
      : PipelineSequence(std::vector<ModuleId>(steps)) {}

  const std::vector<ModuleId>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  bool terminated() const { return terminated_; }
  bool contains(ModuleId id) const;

  /// Comma-separated module names, e.g. "Exposure,WhiteBalance,Gamma".
  /// The empty pipeline renders as "".
  std::string to_string() const;
  /// Inverse of to_string(). Throws InvalidArgument on unknown names or repeats.
  static PipelineSequence parse(std::string_view text);

  bool operator==(const PipelineSequence&) const = default;

 private:
  std::vector<ModuleId> steps_;
  bool terminated_ = true;
};

/// Raw parameters of all ten modules concatenated in ModuleId order.
class ParamVector {
 public:
  ParamVector() { values_.fill(0.5); }
  /// Throws InvalidArgument unless exactly kTotalParams values in [0, 1].
  explicit ParamVector(std::span<const double> values);

  std::span<const double> slice(ModuleId id) const {
    return std::span<const double>(values_).subspan(param_offset(id), param_count(id));
  }
  std::span<double> slice(ModuleId id) {
    return std::span<double>(values_).subspan(param_offset(id), param_count(id));
  }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  /// Sets entry i; throws InvalidArgument if v is outside [0, 1].
  void set(std::size_t i, double v);

  bool operator==(const ParamVector&) const = default;

 private:
  std::array<double, kTotalParams> values_{};
};

/// Reverse-mode cache of one pipeline execution.
struct PipelineTrace {
  std::vector<Image> inputs;  // input to each step, plus the unclamped final output
  PipelineSequence sequence;
  ParamVector params;
};

struct PipelineResult {
  Image output;  // clamped to [0, 1]
  PipelineTrace trace;
};

/// Applies the modules left to right and clamps the final image to [0, 1].
PipelineResult apply_pipeline(const Image& img, const PipelineSequence& seq,
                              const ParamVector& params);

/// Output-only variant that skips the trace.
Image run_pipeline(const Image& img, const PipelineSequence& seq, const ParamVector& params);

/// Gradient of a loss with respect to all kTotalParams raw parameters, given
/// the gradient with respect to the clamped output. Unselected modules get 0.
std::array<double, kTotalParams> pipeline_backward(const PipelineTrace& trace,
                                                   const Image& upstream);

}  // namespace seqisp
