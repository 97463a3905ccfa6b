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
#include <bitset>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqisp/kernels.hpp"
#include "seqisp/pipeline.hpp"
#include "seqisp/rng.hpp"
#include "seqisp/tensor.hpp"

namespace seqisp {

// Action indices 0..9 are modules (ModuleId order), 10 is the end token.
// The start token is only ever an input.
inline constexpr std::size_t kNumActions = kNumModules + 1;
inline constexpr std::size_t kEndAction = kNumModules;
inline constexpr std::size_t kStartToken = kNumModules + 1;
inline constexpr std::size_t kNumTokens = kNumModules + 2;
inline constexpr std::size_t kMaxSteps = kNumModules + 1;

using Distribution = std::array<double, kNumActions>;
using ActionMask = std::bitset<kNumActions>;
/// Modules the policy may select at all.
using ModulePool = std::bitset<kNumModules>;

ModulePool full_pool();
/// Comma-separated module names; empty text means the full pool.
ModulePool parse_pool(std::string_view text);
std::string pool_to_string(const ModulePool& pool);

/// Exponential half-life decay from tau_max toward tau_min.
struct TemperatureSchedule {
  double tau_max = 2.5;
  double tau_min = 0.2;
  double half_life = 3000.0;

  double at(std::uint64_t step) const;
};

double temperature(std::uint64_t step, const TemperatureSchedule& schedule = {});

/// softmax(logits / tau) restricted to `allowed`; disallowed entries are 0.
Distribution masked_softmax(std::span<const double> logits, const ActionMask& allowed,
                            double tau);
/// Entropy in nats of a distribution (0 log 0 = 0).
double entropy_of(const Distribution& p);

struct SampledSequence {
  PipelineSequence sequence;
  std::vector<std::size_t> actions;  // emitted actions, end token included
  std::vector<double> step_log_probs;
  std::vector<double> step_entropies;
  double temperature = 1.0;

  double log_prob() const;
};

/// Autoregressive distribution over repetition-free module sequences.
/// Subclasses supply the per-step logits; masking, sampling, decoding and
/// the REINFORCE gradient are shared.
class SequencePolicy {
 public:
  virtual ~SequencePolicy() = default;

  virtual std::string_view kind() const = 0;
  virtual std::unique_ptr<SequencePolicy> clone() const = 0;

  ParamSet& weights() { return weights_; }
  const ParamSet& weights() const { return weights_; }
  const ModulePool& pool() const { return pool_; }
  void set_pool(const ModulePool& pool) { pool_ = pool; }

  /// Actions available after `used` modules have been emitted.
  ActionMask allowed_actions(const ModulePool& used) const;

  /// Masked distributions at each step while teacher-forcing `actions`.
  /// Returns one distribution per action (the one it was chosen from).
  std::vector<Distribution> forced_distributions(std::span<const std::size_t> actions,
                                                 double tau) const;

  /// Samples until the end token. Never repeats a module.
  SampledSequence sample(double tau, Rng& rng) const;

  struct DecodeStep {
    std::size_t action;
    Distribution probs;
  };
  /// Argmax rollout (ties to the lowest action index) with the
  /// distribution each action was taken from, evaluated at `tau`.
  std::vector<DecodeStep> greedy_trace(double tau = 1.0) const;
  PipelineSequence greedy_decode() const;

  /// Sum of log-probabilities of the sequence's modules plus its end token.
  double sequence_log_prob(const PipelineSequence& seq, double tau = 1.0) const;
  /// Mean per-step entropy of the masked distribution along the greedy path.
  double entropy(double tau) const;

  /// Gradient of  -(1/B) sum_b (R_b - b) sum_t log pi(a_bt)  with respect to
  /// the weights, where b is the batch-mean reward if `baseline`, else 0.
  ParamSet backward(std::span<const SampledSequence> batch, std::span<const double> rewards,
                    bool baseline = false) const;

  /// grad += scale * d/dw sum_t log pi_tau(actions[t]).
  virtual void accumulate_log_prob_grad(std::span<const std::size_t> actions, double tau,
                                        double scale, ParamSet& grad) const = 0;

 protected:
  explicit SequencePolicy(const ModulePool& pool) : pool_(pool) {}

  struct Cursor {
    std::vector<double> hidden;
    std::size_t step = 0;
    std::size_t prev_token = kStartToken;
  };
  virtual Cursor start() const = 0;
  /// Writes the step's raw logits and advances the cursor by consuming
  /// `prev_token`. The caller then sets prev_token to the chosen action.
  virtual void next_logits(Cursor& cursor, std::span<double> logits) const = 0;

  static void validate_actions(std::span<const std::size_t> actions);

  ParamSet weights_;
  ModulePool pool_;
};

struct GruPolicyConfig {
  std::size_t hidden = 128;
  std::size_t token_embed = 32;
  std::size_t step_embed = 16;
  std::size_t film_hidden = 32;
  double init_scale = 0.08;
};

/// GRU recurrence over the previous token, FiLM modulation of the hidden
/// state by a learned step embedding, and a linear decoder. The decoder is
/// zero-initialized so the initial policy is uniform.
class GruPolicy final : public SequencePolicy {
 public:
  enum Index : std::size_t {
    kTokenEmbedding = 0, kWz, kWr, kWh, kUz, kUr, kUh, kBz, kBr, kBh,
    kStepEmbedding, kFilmW1, kFilmB1, kFilmW2, kFilmB2, kDecoderW, kDecoderB,
  };

  GruPolicy(std::uint64_t seed, const GruPolicyConfig& config = {},
            const ModulePool& pool = full_pool());

  std::string_view kind() const override { return "gru"; }
  std::unique_ptr<SequencePolicy> clone() const override;
  const GruPolicyConfig& config() const { return config_; }

  struct GruCache {
    std::size_t token = 0;
    std::vector<double> h_prev, z, r, candidate, h;
  };
  struct FilmCache {
    std::size_t step = 0;
    std::vector<double> h, pre, act, gamma, beta, out;
  };

  GruCache gru_step(std::span<const double> h_prev, std::size_t token) const;
  /// Accumulates weight gradients; returns the gradient w.r.t. h_prev.
  std::vector<double> gru_step_backward(const GruCache& cache, std::span<const double> g_h,
                                        ParamSet& grad) const;

  /// h * (1 + gamma_t) + beta_t for step index `step` (0-based).
  FilmCache film_modulate(std::span<const double> h, std::size_t step) const;
  std::vector<double> film_backward(const FilmCache& cache, std::span<const double> g_out,
                                    ParamSet& grad) const;

  void decoder_logits(std::span<const double> h_mod, std::span<double> logits) const;

  void accumulate_log_prob_grad(std::span<const std::size_t> actions, double tau, double scale,
                                ParamSet& grad) const override;

  /// Rebuilds a policy around existing weights (checkpoint loading).
  static GruPolicy from_weights(ParamSet weights, const ModulePool& pool);

 protected:
  Cursor start() const override;
  void next_logits(Cursor& cursor, std::span<double> logits) const override;

 private:
  GruPolicy(const GruPolicyConfig& config, const ModulePool& pool);
  void allocate();

  GruPolicyConfig config_;
};

/// Ablation: a learnable (M+1) x (M+1) logit table whose row t is the
/// step-t distribution. No recurrence.
class TablePolicy final : public SequencePolicy {
 public:
  explicit TablePolicy(const ModulePool& pool = full_pool());

  std::string_view kind() const override { return "table"; }
  std::unique_ptr<SequencePolicy> clone() const override;

  void accumulate_log_prob_grad(std::span<const std::size_t> actions, double tau, double scale,
                                ParamSet& grad) const override;

  static TablePolicy from_weights(ParamSet weights, const ModulePool& pool);

 protected:
  Cursor start() const override;
  void next_logits(Cursor& cursor, std::span<double> logits) const override;
};

/// "gru" or "table".
std::unique_ptr<SequencePolicy> make_policy(std::string_view kind, std::uint64_t seed,
                                            const ModulePool& pool,
                                            const GruPolicyConfig& gru = {});

}  // namespace seqisp
