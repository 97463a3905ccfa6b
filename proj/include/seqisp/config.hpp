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
#include <string>
#include <string_view>

#include "seqisp/objective.hpp"
#include "seqisp/policy.hpp"
#include "seqisp/predictor.hpp"

namespace seqisp {

enum class UpdateSchedule { kAlternate, kJoint };

struct TrainConfig {
  // Data
  std::string task = "synth_restore";
  std::string data_dir;  // enhance_mse: directory with train/ and eval/ PPM pairs
  std::uint64_t data_seed = 0;
  std::size_t n_train = 200;
  std::size_t n_eval = 16;
  std::size_t image_size = 64;

  // Model
  std::string policy = "gru";
  ModulePool pool = full_pool();
  GruPolicyConfig gru;
  PredictorConfig predictor;

  // Optimization
  std::uint64_t seed = 1;
  std::size_t batch_size = 8;
  std::uint64_t iterations = 3000;
  double lr_param = 1e-4;
  double lr_seq = 3e-5;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double adam_eps = 1e-8;
  TemperatureSchedule temperature;
  PenaltyConfig penalty;
  UpdateSchedule schedule = UpdateSchedule::kAlternate;
  bool baseline = false;
  std::uint64_t eval_interval = 100;

  // Oracle
  std::size_t oracle_grid = 21;
  std::size_t oracle_rounds = 3;

  /// Throws InvalidArgument when a value is out of range.
  void validate() const;
};

/// Parses `key = value` lines. Blank lines and lines starting with '#' are
/// ignored. Unknown keys, duplicate keys and malformed values throw
/// InvalidArgument naming the line.
TrainConfig parse_config(std::string_view text);
TrainConfig load_config(const std::filesystem::path& path);
/// Every key with its current value, one per line; parse_config round-trips it.
std::string format_config(const TrainConfig& cfg);

}  // namespace seqisp
