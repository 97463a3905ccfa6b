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

#include "seqisp/objective.hpp"

#include "seqisp/error.hpp"

namespace seqisp {

double MseTask::loss(const Image& output, const Image& target) const {
  return mse(output, target);
}

Image MseTask::loss_grad(const Image& output, const Image& target) const {
  if (!output.same_shape(target)) throw InvalidArgument("mse gradient: image size mismatch");
  Image g(output.height(), output.width());
  const double scale = 2.0 / static_cast<double>(output.size());
  for (std::size_t i = 0; i < output.size(); ++i) g[i] = scale * (output[i] - target[i]);
  return g;
}

std::unique_ptr<TaskLoss> make_task(std::string_view name) {
  if (name == "enhance_mse" || name == "synth_restore") {
    return std::make_unique<MseTask>(std::string(name));
  }
  throw InvalidArgument("unknown task '" + std::string(name) +
                        "' (expected enhance_mse or synth_restore)");
}

void PenaltyConfig::validate() const {
  if (alpha_low < 0.0 || alpha_high < 0.0 || length_penalty < 0.0) {
    throw InvalidArgument("penalty weights must be non-negative");
  }
  if (!(intensity_low < intensity_high)) {
    throw InvalidArgument("penalty intensity_low must be below intensity_high");
  }
}

double penalty(const Image& output, const PenaltyConfig& cfg, std::size_t seq_len) {
  const double m = mean_intensity(output);
  double p = 0.0;
  if (m < cfg.intensity_low) p += cfg.alpha_low * (cfg.intensity_low - m);
  if (m > cfg.intensity_high) p += cfg.alpha_high * (m - cfg.intensity_high);
  return p + cfg.length_penalty * static_cast<double>(seq_len);
}

Image penalty_grad(const Image& output, const PenaltyConfig& cfg) {
  const double m = mean_intensity(output);
  double slope = 0.0;
  if (m < cfg.intensity_low) slope = -cfg.alpha_low;
  if (m > cfg.intensity_high) slope = cfg.alpha_high;
  return Image(output.height(), output.width(), slope / static_cast<double>(output.size()));
}

double reward(const Image& input, const Image& output, const Image& target, const TaskLoss& task,
              const PenaltyConfig& cfg, std::size_t seq_len) {
  return task.loss(input, target) - task.loss(output, target) - penalty(output, cfg, seq_len);
}

double reinforce_loss(std::span<const double> rewards, std::span<const double> log_probs,
                      bool baseline) {
  if (rewards.size() != log_probs.size()) {
    throw InvalidArgument("reinforce_loss: rewards and log-probs differ in length");
  }
  if (rewards.empty()) return 0.0;
  const double n = static_cast<double>(rewards.size());
  double b = 0.0;
  if (baseline) {
    for (double r : rewards) b += r;
    b /= n;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < rewards.size(); ++i) acc += (rewards[i] - b) * log_probs[i];
  return -acc / n;
}

ParamLoss param_loss(const Image& output, const Image& target, const TaskLoss& task,
                     const PenaltyConfig& cfg, std::size_t seq_len) {
  ParamLoss out;
  out.value = task.loss(output, target) + penalty(output, cfg, seq_len);
  out.grad = task.loss_grad(output, target);
  const Image pg = penalty_grad(output, cfg);
  for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad[i] += pg[i];
  return out;
}

}  // namespace seqisp
