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

#include "seqisp/adam.hpp"

#include <cmath>

#include "seqisp/error.hpp"

namespace seqisp {

Adam::Adam(const ParamSet& layout, const AdamConfig& config)
    : config_(config), m_(layout.zeros_like()), v_(layout.zeros_like()) {
  if (!(config.lr > 0.0)) throw InvalidArgument("Adam learning rate must be positive");
}

void Adam::step(ParamSet& weights, const ParamSet& grads) {
  if (!weights.same_layout(m_) || !grads.same_layout(m_)) {
    throw InvalidArgument("Adam step: weight/gradient layout does not match optimizer state");
  }
  ++steps_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t t = 0; t < weights.size(); ++t) {
    auto& w = weights[t].data;
    auto& m = m_[t].data;
    auto& v = v_[t].data;
    const auto& g = grads[t].data;
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      w[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

}  // namespace seqisp
