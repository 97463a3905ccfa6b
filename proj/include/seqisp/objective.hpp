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

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "seqisp/image.hpp"

namespace seqisp {

/// Downstream task loss L_T. The context of a sample is its target image.
class TaskLoss {
 public:
  virtual ~TaskLoss() = default;
  virtual std::string_view name() const = 0;
  virtual double loss(const Image& output, const Image& target) const = 0;
  virtual Image loss_grad(const Image& output, const Image& target) const = 0;
};

/// Mean squared error against the target; gradient 2 (output - target) / N.
class MseTask final : public TaskLoss {
 public:
  explicit MseTask(std::string name = "enhance_mse") : name_(std::move(name)) {}
  std::string_view name() const override { return name_; }
  double loss(const Image& output, const Image& target) const override;
  Image loss_grad(const Image& output, const Image& target) const override;

 private:
  std::string name_;
};

/// "enhance_mse" or "synth_restore".
std::unique_ptr<TaskLoss> make_task(std::string_view name);

struct PenaltyConfig {
  double alpha_low = 1.0;
  double alpha_high = 1.0;
  double intensity_low = 0.01;
  double intensity_high = 0.9;
  double length_penalty = 0.0;  // per selected module

  void validate() const;
};

/// a1 [I_low - mean]+ + a2 [mean - I_high]+ + length_penalty * seq_len.
double penalty(const Image& output, const PenaltyConfig& cfg, std::size_t seq_len);
/// Gradient of penalty() with respect to the output; zero at the kinks.
Image penalty_grad(const Image& output, const PenaltyConfig& cfg);

/// L_T(input) - L_T(output) - P(output).
double reward(const Image& input, const Image& output, const Image& target, const TaskLoss& task,
              const PenaltyConfig& cfg, std::size_t seq_len);

/// -(1/B) sum_b (R_b - b) * log_prob_b with b the batch-mean reward when
/// `baseline`, else 0.
double reinforce_loss(std::span<const double> rewards, std::span<const double> log_probs,
                      bool baseline = false);

struct ParamLoss {
  double value = 0.0;
  Image grad;
};

/// L_T(output) + P(output) and its gradient image.
ParamLoss param_loss(const Image& output, const Image& target, const TaskLoss& task,
                     const PenaltyConfig& cfg, std::size_t seq_len);

}  // namespace seqisp
