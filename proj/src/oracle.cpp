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

#include "seqisp/oracle.hpp"

#include <algorithm>
#include <limits>

#include "seqisp/error.hpp"
#include "seqisp/parallel.hpp"

namespace seqisp {

std::vector<PipelineSequence> enumerate_sequences(std::span<const ModuleId> pool) {
  if (pool.size() > kMaxOraclePool) {
    throw InvalidArgument("oracle pools are limited to " + std::to_string(kMaxOraclePool) +
                          " modules");
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      if (pool[i] == pool[j]) throw InvalidArgument("oracle pool lists a module twice");
    }
  }
  std::vector<PipelineSequence> out;
  const std::size_t n = pool.size();
  for (std::size_t k = 0; k <= n; ++k) {
    // Depth-first over positions, which yields lexicographic order.
    std::vector<std::size_t> picked;
    std::vector<bool> used(n, false);
    auto recurse = [&](auto&& self) -> void {
      if (picked.size() == k) {
        std::vector<ModuleId> steps;
        for (std::size_t p : picked) steps.push_back(pool[p]);
        out.emplace_back(std::move(steps));
        return;
      }
      for (std::size_t p = 0; p < n; ++p) {
        if (used[p]) continue;
        used[p] = true;
        picked.push_back(p);
        self(self);
        picked.pop_back();
        used[p] = false;
      }
    };
    recurse(recurse);
  }
  return out;
}

double mean_reward(const PipelineSequence& seq, const ParamVector& params,
                   std::span<const Sample> samples, const TaskLoss& task,
                   const PenaltyConfig& penalty) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& s : samples) {
    const Image out = run_pipeline(s.input, seq, params);
    acc += reward(s.input, out, s.target, task, penalty, seq.size());
  }
  return acc / static_cast<double>(samples.size());
}

OracleFit optimize_params(const PipelineSequence& seq, std::span<const Sample> samples,
                          const TaskLoss& task, const OracleOptions& options) {
  if (options.grid < 2) throw InvalidArgument("oracle grid needs at least two points");
  for (ModuleId id : seq.steps()) {
    if (param_count(id) > 3) {
      throw InvalidArgument("oracle cannot search " + std::string(module_name(id)) +
                            " (more than three parameters)");
    }
  }
  OracleFit fit;
  fit.reward = mean_reward(seq, fit.params, samples, task, options.penalty);
  const double step = 1.0 / static_cast<double>(options.grid - 1);
  for (std::size_t round = 0; round < options.rounds; ++round) {
    for (ModuleId id : seq.steps()) {
      for (std::size_t j = 0; j < param_count(id); ++j) {
        const std::size_t k = param_offset(id) + j;
        ParamVector trial = fit.params;
        for (std::size_t g = 0; g < options.grid; ++g) {
          trial.set(k, std::min(1.0, static_cast<double>(g) * step));
          const double r = mean_reward(seq, trial, samples, task, options.penalty);
          if (r > fit.reward) {
            fit.reward = r;
            fit.params = trial;
          }
        }
      }
    }
    fit.round_rewards.push_back(fit.reward);
  }
  return fit;
}

OracleResult oracle_best(std::span<const ModuleId> pool, std::span<const Sample> samples,
                         const TaskLoss& task, const OracleOptions& options) {
  const auto sequences = enumerate_sequences(pool);
  std::vector<OracleFit> fits(sequences.size());
  parallel_for(sequences.size(), options.threads, [&](std::size_t i) {
    fits[i] = optimize_params(sequences[i], samples, task, options);
  });
  OracleResult result;
  result.best_reward = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    result.table.emplace_back(sequences[i], fits[i].reward);
    if (fits[i].reward > result.best_reward) {
      result.best_reward = fits[i].reward;
      result.best_sequence = sequences[i];
      result.best_params = fits[i].params;
    }
  }
  return result;
}

}  // namespace seqisp
