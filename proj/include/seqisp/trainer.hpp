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
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "seqisp/adam.hpp"
#include "seqisp/checkpoint.hpp"
#include "seqisp/config.hpp"
#include "seqisp/objective.hpp"
#include "seqisp/pipeline.hpp"
#include "seqisp/policy.hpp"
#include "seqisp/predictor.hpp"
#include "seqisp/synth.hpp"

namespace seqisp {

struct MetricsRow {
  std::uint64_t iter = 0;
  double tau = 0.0;
  double mean_reward = 0.0;
  double reinforce_loss = 0.0;
  double param_loss = 0.0;
  double policy_entropy = 0.0;
  std::string greedy_pipeline;
  double greedy_log_prob = 0.0;
  double eval_mse = 0.0;
  double eval_psnr = 0.0;
};

std::string metrics_header();
std::string format_metrics_row(const MetricsRow& row);

struct EvalResult {
  PipelineSequence sequence;
  double mse = 0.0;
  double psnr = 0.0;
  double reward = 0.0;
  double input_mse = 0.0;
  double input_psnr = 0.0;
};

/// The two networks, enough to run inference.
struct Model {
  std::unique_ptr<SequencePolicy> policy;
  ParamPredictor predictor = ParamPredictor::zeros();
};

/// Reads the networks out of a training checkpoint.
Model load_model(const std::filesystem::path& path);

/// Greedy sequence applied with per-image predicted parameters.
EvalResult evaluate(const SequencePolicy& policy, const ParamPredictor& predictor,
                    std::span<const Sample> samples, const TaskLoss& task,
                    const PenaltyConfig& penalty, std::size_t threads = 1);

/// Loads PPM pairs for enhance_mse or generates them for synth_restore.
Dataset load_task_data(const TrainConfig& cfg);

class Trainer {
 public:
  Trainer(TrainConfig config, Dataset data, std::size_t threads = 1);

  struct IterationStats {
    double tau = 0.0;
    double mean_reward = 0.0;
    double reinforce_loss = 0.0;
    double param_loss = 0.0;
    bool policy_updated = false;
    bool params_updated = false;
  };

  /// Forward pass and update for the current iteration, then advances it.
  IterationStats step();

  /// Runs until config().iterations, logging a row every eval interval and
  /// at the end. With an output directory, writes metrics.csv (appending
  /// when resuming), a checkpoint every eval interval and final.ckpt.
  std::vector<MetricsRow> run(const std::filesystem::path& out_dir = {},
                              const std::function<void(const MetricsRow&)>& on_row = {});

  EvalResult evaluate() const;

  TensorArchive to_archive() const;
  void save(const std::filesystem::path& path) const;
  /// Restores networks, optimizer state and iteration. Throws FormatError
  /// when the checkpoint does not match this configuration.
  void load(const std::filesystem::path& path);
  void restore(const TensorArchive& archive);

  const TrainConfig& config() const { return config_; }
  const Dataset& data() const { return data_; }
  const SequencePolicy& policy() const { return *policy_; }
  SequencePolicy& policy() { return *policy_; }
  const ParamPredictor& predictor() const { return predictor_; }
  ParamPredictor& predictor() { return predictor_; }
  std::uint64_t iteration() const { return iteration_; }
  const TaskLoss& task() const { return *task_; }

 private:
  struct Item;
  std::vector<Item> forward(std::uint64_t t, double tau) const;
  MetricsRow make_row(std::uint64_t t, const IterationStats& stats) const;
  IterationStats summarize(const std::vector<Item>& items, double tau) const;
  void update(std::uint64_t t, const std::vector<Item>& items, double tau, IterationStats& stats);

  TrainConfig config_;
  Dataset data_;
  std::size_t threads_;
  std::unique_ptr<TaskLoss> task_;
  std::unique_ptr<SequencePolicy> policy_;
  ParamPredictor predictor_;
  Adam policy_adam_;
  Adam param_adam_;
  std::uint64_t iteration_ = 0;
};

}  // namespace seqisp
