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

#include "seqisp/pipeline.hpp"

#include <algorithm>
#include <bitset>
#include <cctype>

#include "seqisp/error.hpp"

namespace seqisp {

PipelineSequence::PipelineSequence(std::vector<ModuleId> steps, bool terminated)
    : steps_(std::move(steps)), terminated_(terminated) {
  if (steps_.size() > kNumModules) {
    throw InvalidArgument("pipeline has " + std::to_string(steps_.size()) +
                          " steps; at most " + std::to_string(kNumModules) + " allowed");
  }
  std::bitset<kNumModules> seen;
  for (ModuleId id : steps_) {
    if (seen.test(index_of(id))) {
      throw InvalidArgument("module " + std::string(module_name(id)) +
                            " appears more than once in pipeline");
    }
    seen.set(index_of(id));
  }
}

bool PipelineSequence::contains(ModuleId id) const {
  return std::find(steps_.begin(), steps_.end(), id) != steps_.end();
}

std::string PipelineSequence::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (i) out += ',';
    out += module_name(steps_[i]);
  }
  return out;
}

PipelineSequence PipelineSequence::parse(std::string_view text) {
  std::vector<ModuleId> steps;
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view token = trim(text.substr(0, comma));
    const auto id = module_from_name(token);
    if (!id) throw InvalidArgument("unknown module name '" + std::string(token) + "'");
    steps.push_back(*id);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
    if (trim(text).empty()) throw InvalidArgument("trailing comma in pipeline text");
  }
  return PipelineSequence(std::move(steps));
}

ParamVector::ParamVector(std::span<const double> values) {
  if (values.size() != kTotalParams) {
    throw InvalidArgument("parameter vector needs " + std::to_string(kTotalParams) +
                          " entries, got " + std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < kTotalParams; ++i) set(i, values[i]);
}

void ParamVector::set(std::size_t i, double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw InvalidArgument("parameter " + std::to_string(i) + " = " + std::to_string(v) +
                          " outside [0, 1]");
  }
  values_.at(i) = v;
}

PipelineResult apply_pipeline(const Image& img, const PipelineSequence& seq,
                              const ParamVector& params) {
  PipelineResult result;
  result.trace.sequence = seq;
  result.trace.params = params;
  result.trace.inputs.reserve(seq.size() + 1);
  result.trace.inputs.push_back(img);
  for (ModuleId id : seq.steps()) {
    result.trace.inputs.push_back(module_forward(id, result.trace.inputs.back(), params.slice(id)));
  }
  result.output = clamp01(result.trace.inputs.back());
  return result;
}

Image run_pipeline(const Image& img, const PipelineSequence& seq, const ParamVector& params) {
  Image current = img;
  for (ModuleId id : seq.steps()) current = module_forward(id, current, params.slice(id));
  return clamp01(current);
}

std::array<double, kTotalParams> pipeline_backward(const PipelineTrace& trace,
                                                   const Image& upstream) {
  std::array<double, kTotalParams> grad{};
  const Image& final_raw = trace.inputs.back();
  if (!final_raw.same_shape(upstream)) {
    throw InvalidArgument("pipeline_backward: upstream shape mismatch");
  }
  Image g = upstream;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (final_raw[i] < 0.0 || final_raw[i] > 1.0) g[i] = 0.0;
  }
  const auto& steps = trace.sequence.steps();
  for (std::size_t j = steps.size(); j-- > 0;) {
    const ModuleId id = steps[j];
    KernelGradients kg = module_vjp(id, trace.inputs[j], trace.params.slice(id), g);
    std::copy(kg.d_params.begin(), kg.d_params.end(), grad.begin() + param_offset(id));
    g = std::move(kg.d_input);
  }
  return grad;
}

}  // namespace seqisp
