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

#include <span>
#include <utility>
#include <vector>

#include "seqisp/objective.hpp"
#include "seqisp/pipeline.hpp"
#include "seqisp/synth.hpp"

namespace seqisp {

inline constexpr std::size_t kMaxOraclePool = 4;

/// Every ordered arrangement of every subset of `pool`, shortest first,
/// then in lexicographic order of pool positions. Pools larger than four
/// modules are rejected.
std::vector<PipelineSequence> enumerate_sequences(std::span<const ModuleId> pool);

struct OracleOptions {
  std::size_t grid = 21;
  std::size_t rounds = 3;
  PenaltyConfig penalty;
  std::size_t threads = 1;
};

struct OracleFit {
  ParamVector params;  // shared across the evaluation set; unused entries 0.5
  double reward = 0.0;
  std::vector<double> round_rewards;  // mean reward after each sweep
};

/// Mean reward of one sequence with one shared parameter vector.
double mean_reward(const PipelineSequence& seq, const ParamVector& params,
                   std::span<const Sample> samples, const TaskLoss& task,
                   const PenaltyConfig& penalty);

/// Coordinate ascent on a uniform grid over [0, 1], sweeping modules in
/// sequence order and parameters in index order, starting from 0.5.
OracleFit optimize_params(const PipelineSequence& seq, std::span<const Sample> samples,
                          const TaskLoss& task, const OracleOptions& options = {});

struct OracleResult {
  PipelineSequence best_sequence;
  ParamVector best_params;
  double best_reward = 0.0;
  std::vector<std::pair<PipelineSequence, double>> table;  // enumeration order
};

OracleResult oracle_best(std::span<const ModuleId> pool, std::span<const Sample> samples,
                         const TaskLoss& task, const OracleOptions& options = {});

}  // namespace seqisp
