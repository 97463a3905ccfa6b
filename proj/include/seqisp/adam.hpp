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

#include "seqisp/tensor.hpp"

namespace seqisp {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double eps = 1e-8;
};

/// Bias-corrected Adam with moments laid out like the weights they track.
class Adam {
 public:
  Adam() = default;
  Adam(const ParamSet& layout, const AdamConfig& config);

  /// weights -= lr * m_hat / (sqrt(v_hat) + eps). Throws on layout mismatch.
  void step(ParamSet& weights, const ParamSet& grads);

  const AdamConfig& config() const { return config_; }
  void set_config(const AdamConfig& config) { config_ = config; }
  std::uint64_t steps() const { return steps_; }
  void set_steps(std::uint64_t n) { steps_ = n; }
  ParamSet& first_moment() { return m_; }
  ParamSet& second_moment() { return v_; }
  const ParamSet& first_moment() const { return m_; }
  const ParamSet& second_moment() const { return v_; }

 private:
  AdamConfig config_;
  ParamSet m_;
  ParamSet v_;
  std::uint64_t steps_ = 0;
};

}  // namespace seqisp
