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

#include "seqisp/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seqisp/error.hpp"

namespace seqisp {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

ModulePool full_pool() { return ModulePool().set(); }

ModulePool parse_pool(std::string_view text) {
  const PipelineSequence listed = PipelineSequence::parse(text);
  if (listed.empty()) return full_pool();
  ModulePool pool;
  for (ModuleId id : listed.steps()) pool.set(index_of(id));
  return pool;
}

std::string pool_to_string(const ModulePool& pool) {
  std::string out;
  for (std::size_t i = 0; i < kNumModules; ++i) {
    if (!pool.test(i)) continue;
    if (!out.empty()) out += ',';
    out += module_name(kAllModules[i]);
  }
  return out;
}

double TemperatureSchedule::at(std::uint64_t step) const {
  return tau_min + (tau_max - tau_min) *
                       std::exp(-std::log(2.0) * static_cast<double>(step) / half_life);
}

double temperature(std::uint64_t step, const TemperatureSchedule& schedule) {
  return schedule.at(step);
}

Distribution masked_softmax(std::span<const double> logits, const ActionMask& allowed,
                            double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("temperature must be positive");
  Distribution p{};
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < kNumActions; ++a) {
    if (allowed.test(a)) top = std::max(top, logits[a]);
  }
  double total = 0.0;
  for (std::size_t a = 0; a < kNumActions; ++a) {
    if (!allowed.test(a)) continue;
    p[a] = std::exp((logits[a] - top) / tau);
    total += p[a];
  }
  for (double& v : p) v /= total;
  return p;
}

double entropy_of(const Distribution& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

double SampledSequence::log_prob() const {
  double acc = 0.0;
  for (double lp : step_log_probs) acc += lp;
  return acc;
}

// ------------------------------------------------------------ SequencePolicy

ActionMask SequencePolicy::allowed_actions(const ModulePool& used) const {
  ActionMask mask;
  for (std::size_t i = 0; i < kNumModules; ++i) mask.set(i, pool_.test(i) && !used.test(i));
  mask.set(kEndAction);
  return mask;
}

void SequencePolicy::validate_actions(std::span<const std::size_t> actions) {
  if (actions.empty() || actions.back() != kEndAction) {
    throw InvalidArgument("action sequence must end with the end token");
  }
  if (actions.size() > kMaxSteps) throw InvalidArgument("action sequence too long");
}

std::vector<Distribution> SequencePolicy::forced_distributions(
    std::span<const std::size_t> actions, double tau) const {
  validate_actions(actions);
  std::vector<Distribution> out;
  out.reserve(actions.size());
  Cursor cursor = start();
  ModulePool used;
  std::array<double, kNumActions> logits{};
  for (std::size_t t = 0; t < actions.size(); ++t) {
    const std::size_t a = actions[t];
    next_logits(cursor, logits);
    const ActionMask allowed = allowed_actions(used);
    if (a >= kNumActions || !allowed.test(a)) {
      throw InvalidArgument("action " + std::to_string(a) + " is masked at step " +
                            std::to_string(t));
    }
    out.push_back(masked_softmax(logits, allowed, tau));
    if (a < kNumModules) used.set(a);
    cursor.prev_token = a;
  }
  return out;
}

SampledSequence SequencePolicy::sample(double tau, Rng& rng) const {
  SampledSequence out;
  out.temperature = tau;
  Cursor cursor = start();
  ModulePool used;
  std::vector<ModuleId> steps;
  std::array<double, kNumActions> logits{};
  while (true) {
    next_logits(cursor, logits);
    const ActionMask allowed = allowed_actions(used);
    const Distribution p = masked_softmax(logits, allowed, tau);
    const double u = rng.uniform();
    std::size_t choice = kEndAction;
    double cum = 0.0;
    for (std::size_t a = 0; a < kNumActions; ++a) {
      if (!allowed.test(a)) continue;
      cum += p[a];
      choice = a;
      if (u < cum) break;
    }
    out.actions.push_back(choice);
    out.step_log_probs.push_back(std::log(p[choice]));
    out.step_entropies.push_back(entropy_of(p));
    if (choice == kEndAction) break;
    used.set(choice);
    steps.push_back(kAllModules[choice]);
    cursor.prev_token = choice;
  }
  out.sequence = PipelineSequence(std::move(steps));
  return out;
}

std::vector<SequencePolicy::DecodeStep> SequencePolicy::greedy_trace(double tau) const {
  std::vector<DecodeStep> trace;
  Cursor cursor = start();
  ModulePool used;
  std::array<double, kNumActions> logits{};
  while (true) {
    next_logits(cursor, logits);
    const ActionMask allowed = allowed_actions(used);
    std::size_t best = kEndAction;
    double best_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < kNumActions; ++a) {
      if (allowed.test(a) && logits[a] > best_logit) {
        best = a;
        best_logit = logits[a];
      }
    }
    trace.push_back({best, masked_softmax(logits, allowed, tau)});
    if (best == kEndAction) break;
    used.set(best);
    cursor.prev_token = best;
  }
  return trace;
}

PipelineSequence SequencePolicy::greedy_decode() const {
  std::vector<ModuleId> steps;
  for (const auto& step : greedy_trace()) {
    if (step.action != kEndAction) steps.push_back(kAllModules[step.action]);
  }
  return PipelineSequence(std::move(steps));
}

namespace {

std::vector<std::size_t> actions_of(const PipelineSequence& seq) {
  std::vector<std::size_t> actions;
  for (ModuleId id : seq.steps()) actions.push_back(index_of(id));
  actions.push_back(kEndAction);
  return actions;
}

}  // namespace

double SequencePolicy::sequence_log_prob(const PipelineSequence& seq, double tau) const {
  const auto actions = actions_of(seq);
  const auto dists = forced_distributions(actions, tau);
  double acc = 0.0;
  for (std::size_t t = 0; t < actions.size(); ++t) acc += std::log(dists[t][actions[t]]);
  return acc;
}

double SequencePolicy::entropy(double tau) const {
  const auto trace = greedy_trace(tau);
  double acc = 0.0;
  for (const auto& step : trace) acc += entropy_of(step.probs);
  return acc / static_cast<double>(trace.size());
}

ParamSet SequencePolicy::backward(std::span<const SampledSequence> batch,
                                  std::span<const double> rewards, bool baseline) const {
  if (batch.size() != rewards.size()) {
    throw InvalidArgument("policy backward: batch and reward counts differ");
  }
  ParamSet grad = weights_.zeros_like();
  if (batch.empty()) return grad;
  double base = 0.0;
  if (baseline) {
    for (double r : rewards) base += r;
    base /= static_cast<double>(rewards.size());
  }
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const double scale = -(rewards[b] - base) * inv_n;
    if (scale == 0.0) continue;
    accumulate_log_prob_grad(batch[b].actions, batch[b].temperature, scale, grad);
  }
  return grad;
}

// ---------------------------------------------------------------- GruPolicy

GruPolicy::GruPolicy(const GruPolicyConfig& config, const ModulePool& pool)
    : SequencePolicy(pool), config_(config) {
  allocate();
}

GruPolicy::GruPolicy(std::uint64_t seed, const GruPolicyConfig& config, const ModulePool& pool)
    : GruPolicy(config, pool) {
  Rng rng(seed);
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (i == kDecoderW || i == kDecoderB) continue;
    weights_[i].fill_uniform(rng, config_.init_scale);
  }
}

void GruPolicy::allocate() {
  const std::size_t h = config_.hidden, e = config_.token_embed;
  const std::size_t s = config_.step_embed, f = config_.film_hidden;
  weights_ = ParamSet();
  weights_.add("gru.token_embedding", {kNumTokens, e});
  weights_.add("gru.w_z", {h, e});
  weights_.add("gru.w_r", {h, e});
  weights_.add("gru.w_h", {h, e});
  weights_.add("gru.u_z", {h, h});
  weights_.add("gru.u_r", {h, h});
  weights_.add("gru.u_h", {h, h});
  weights_.add("gru.b_z", {h});
  weights_.add("gru.b_r", {h});
  weights_.add("gru.b_h", {h});
  weights_.add("film.step_embedding", {kMaxSteps, s});
  weights_.add("film.w1", {f, s});
  weights_.add("film.b1", {f});
  weights_.add("film.w2", {2 * h, f});
  weights_.add("film.b2", {2 * h});
  weights_.add("decoder.w", {kNumActions, h});
  weights_.add("decoder.b", {kNumActions});
}

std::unique_ptr<SequencePolicy> GruPolicy::clone() const {
  return std::make_unique<GruPolicy>(*this);
}

GruPolicy GruPolicy::from_weights(ParamSet weights, const ModulePool& pool) {
  GruPolicyConfig config;
  const std::size_t emb = weights.find("gru.token_embedding");
  const std::size_t w1 = weights.find("film.w1");
  if (emb == weights.size() || w1 == weights.size()) {
    throw FormatError("GRU policy weights missing embedding or FiLM tensors");
  }
  config.token_embed = weights[emb].shape.at(1);
  config.hidden = weights[weights.find("gru.w_z")].shape.at(0);
  config.film_hidden = weights[w1].shape.at(0);
  config.step_embed = weights[w1].shape.at(1);
  GruPolicy policy(config, pool);
  if (!policy.weights_.same_layout(weights)) {
    throw FormatError("GRU policy weights have an unexpected layout");
  }
  policy.weights_ = std::move(weights);
  return policy;
}

GruPolicy::GruCache GruPolicy::gru_step(std::span<const double> h_prev, std::size_t token) const {
  const std::size_t h = config_.hidden;
  const auto& w = weights_;
  GruCache c;
  c.token = token;
  c.h_prev.assign(h_prev.begin(), h_prev.end());
  const auto x = w[kTokenEmbedding].row(token);

  c.z.assign(w[kBz].data.begin(), w[kBz].data.end());
  matvec_add(w[kWz], x, c.z);
  matvec_add(w[kUz], h_prev, c.z);
  c.r.assign(w[kBr].data.begin(), w[kBr].data.end());
  matvec_add(w[kWr], x, c.r);
  matvec_add(w[kUr], h_prev, c.r);
  for (std::size_t i = 0; i < h; ++i) {
    c.z[i] = sigmoid(c.z[i]);
    c.r[i] = sigmoid(c.r[i]);
  }
  std::vector<double> rh(h);
  for (std::size_t i = 0; i < h; ++i) rh[i] = c.r[i] * h_prev[i];
  c.candidate.assign(w[kBh].data.begin(), w[kBh].data.end());
  matvec_add(w[kWh], x, c.candidate);
  matvec_add(w[kUh], rh, c.candidate);
  c.h.resize(h);
  for (std::size_t i = 0; i < h; ++i) {
    c.candidate[i] = std::tanh(c.candidate[i]);
    c.h[i] = (1.0 - c.z[i]) * h_prev[i] + c.z[i] * c.candidate[i];
  }
  return c;
}

std::vector<double> GruPolicy::gru_step_backward(const GruCache& c, std::span<const double> g_h,
                                                 ParamSet& grad) const {
  const std::size_t h = config_.hidden;
  const auto& w = weights_;
  const auto x = w[kTokenEmbedding].row(c.token);
  std::vector<double> g_prev(h, 0.0), g_x(config_.token_embed, 0.0);
  std::vector<double> g_az(h), g_ar(h), g_ah(h), rh(h);

  for (std::size_t i = 0; i < h; ++i) {
    const double gz = g_h[i] * (c.candidate[i] - c.h_prev[i]);
    const double gc = g_h[i] * c.z[i];
    g_prev[i] += g_h[i] * (1.0 - c.z[i]);
    g_az[i] = gz * c.z[i] * (1.0 - c.z[i]);
    g_ah[i] = gc * (1.0 - c.candidate[i] * c.candidate[i]);
    rh[i] = c.r[i] * c.h_prev[i];
  }

  // Candidate gate.
  outer_add(grad[kWh], g_ah, x);
  outer_add(grad[kUh], g_ah, rh);
  for (std::size_t i = 0; i < h; ++i) grad[kBh][i] += g_ah[i];
  matvec_t_add(w[kWh], g_ah, g_x);
  std::vector<double> g_rh(h, 0.0);
  matvec_t_add(w[kUh], g_ah, g_rh);
  for (std::size_t i = 0; i < h; ++i) {
    g_prev[i] += g_rh[i] * c.r[i];
    g_ar[i] = g_rh[i] * c.h_prev[i] * c.r[i] * (1.0 - c.r[i]);
  }

  // Reset and update gates.
  outer_add(grad[kWr], g_ar, x);
  outer_add(grad[kUr], g_ar, c.h_prev);
  outer_add(grad[kWz], g_az, x);
  outer_add(grad[kUz], g_az, c.h_prev);
  for (std::size_t i = 0; i < h; ++i) {
    grad[kBr][i] += g_ar[i];
    grad[kBz][i] += g_az[i];
  }
  matvec_t_add(w[kWr], g_ar, g_x);
  matvec_t_add(w[kWz], g_az, g_x);
  matvec_t_add(w[kUr], g_ar, g_prev);
  matvec_t_add(w[kUz], g_az, g_prev);

  auto emb_grad = grad[kTokenEmbedding].row(c.token);
  for (std::size_t k = 0; k < g_x.size(); ++k) emb_grad[k] += g_x[k];
  return g_prev;
}

GruPolicy::FilmCache GruPolicy::film_modulate(std::span<const double> h, std::size_t step) const {
  if (step >= kMaxSteps) throw InvalidArgument("FiLM step index out of range");
  const std::size_t hid = config_.hidden;
  const auto& w = weights_;
  FilmCache c;
  c.step = step;
  c.h.assign(h.begin(), h.end());
  const auto s = w[kStepEmbedding].row(step);
  c.pre.assign(w[kFilmB1].data.begin(), w[kFilmB1].data.end());
  matvec_add(w[kFilmW1], s, c.pre);
  c.act.resize(c.pre.size());
  for (std::size_t i = 0; i < c.pre.size(); ++i) c.act[i] = std::max(0.0, c.pre[i]);
  std::vector<double> gb(w[kFilmB2].data.begin(), w[kFilmB2].data.end());
  matvec_add(w[kFilmW2], c.act, gb);
  c.gamma.assign(gb.begin(), gb.begin() + static_cast<long>(hid));
  c.beta.assign(gb.begin() + static_cast<long>(hid), gb.end());
  c.out.resize(hid);
  for (std::size_t i = 0; i < hid; ++i) c.out[i] = h[i] * (1.0 + c.gamma[i]) + c.beta[i];
  return c;
}

std::vector<double> GruPolicy::film_backward(const FilmCache& c, std::span<const double> g_out,
                                             ParamSet& grad) const {
  const std::size_t hid = config_.hidden;
  const auto& w = weights_;
  std::vector<double> g_h(hid), g_gb(2 * hid);
  for (std::size_t i = 0; i < hid; ++i) {
    g_h[i] = g_out[i] * (1.0 + c.gamma[i]);
    g_gb[i] = g_out[i] * c.h[i];
    g_gb[hid + i] = g_out[i];
  }
  outer_add(grad[kFilmW2], g_gb, c.act);
  for (std::size_t i = 0; i < g_gb.size(); ++i) grad[kFilmB2][i] += g_gb[i];
  std::vector<double> g_act(c.act.size(), 0.0);
  matvec_t_add(w[kFilmW2], g_gb, g_act);
  for (std::size_t i = 0; i < g_act.size(); ++i) {
    if (c.pre[i] <= 0.0) g_act[i] = 0.0;
  }
  const auto s = w[kStepEmbedding].row(c.step);
  outer_add(grad[kFilmW1], g_act, s);
  for (std::size_t i = 0; i < g_act.size(); ++i) grad[kFilmB1][i] += g_act[i];
  matvec_t_add(w[kFilmW1], g_act, grad[kStepEmbedding].row(c.step));
  return g_h;
}

void GruPolicy::decoder_logits(std::span<const double> h_mod, std::span<double> logits) const {
  matvec(weights_[kDecoderW], h_mod, logits);
  for (std::size_t a = 0; a < kNumActions; ++a) logits[a] += weights_[kDecoderB][a];
}

SequencePolicy::Cursor GruPolicy::start() const {
  Cursor c;
  c.hidden.assign(config_.hidden, 0.0);
  return c;
}

void GruPolicy::next_logits(Cursor& cursor, std::span<double> logits) const {
  GruCache g = gru_step(cursor.hidden, cursor.prev_token);
  const FilmCache f = film_modulate(g.h, cursor.step);
  decoder_logits(f.out, logits);
  cursor.hidden = std::move(g.h);
  ++cursor.step;
}

void GruPolicy::accumulate_log_prob_grad(std::span<const std::size_t> actions, double tau,
                                         double scale, ParamSet& grad) const {
  validate_actions(actions);
  const std::size_t steps = actions.size();
  std::vector<GruCache> gru(steps);
  std::vector<FilmCache> film(steps);
  std::vector<Distribution> probs(steps);
  std::vector<ActionMask> masks(steps);

  std::vector<double> h(config_.hidden, 0.0);
  std::size_t prev = kStartToken;
  ModulePool used;
  std::array<double, kNumActions> logits{};
  for (std::size_t t = 0; t < steps; ++t) {
    gru[t] = gru_step(h, prev);
    film[t] = film_modulate(gru[t].h, t);
    decoder_logits(film[t].out, logits);
    masks[t] = allowed_actions(used);
    if (!masks[t].test(actions[t])) throw InvalidArgument("masked action in sequence");
    probs[t] = masked_softmax(logits, masks[t], tau);
    if (actions[t] < kNumModules) used.set(actions[t]);
    prev = actions[t];
    h = gru[t].h;
  }

  std::vector<double> g_next(config_.hidden, 0.0);
  std::vector<double> g_logits(kNumActions);
  for (std::size_t t = steps; t-- > 0;) {
    for (std::size_t a = 0; a < kNumActions; ++a) {
      const double onehot = a == actions[t] ? 1.0 : 0.0;
      g_logits[a] = masks[t].test(a) ? scale * (onehot - probs[t][a]) / tau : 0.0;
    }
    outer_add(grad[kDecoderW], g_logits, film[t].out);
    for (std::size_t a = 0; a < kNumActions; ++a) grad[kDecoderB][a] += g_logits[a];
    std::vector<double> g_mod(config_.hidden, 0.0);
    matvec_t_add(weights_[kDecoderW], g_logits, g_mod);
    std::vector<double> g_h = film_backward(film[t], g_mod, grad);
    for (std::size_t i = 0; i < g_h.size(); ++i) g_h[i] += g_next[i];
    g_next = gru_step_backward(gru[t], g_h, grad);
  }
}

// -------------------------------------------------------------- TablePolicy

TablePolicy::TablePolicy(const ModulePool& pool) : SequencePolicy(pool) {
  weights_.add("table.logits", {kMaxSteps, kNumActions});
}

std::unique_ptr<SequencePolicy> TablePolicy::clone() const {
  return std::make_unique<TablePolicy>(*this);
}

TablePolicy TablePolicy::from_weights(ParamSet weights, const ModulePool& pool) {
  TablePolicy policy(pool);
  if (!policy.weights_.same_layout(weights)) {
    throw FormatError("table policy weights have an unexpected layout");
  }
  policy.weights_ = std::move(weights);
  return policy;
}

SequencePolicy::Cursor TablePolicy::start() const { return Cursor{}; }

void TablePolicy::next_logits(Cursor& cursor, std::span<double> logits) const {
  const auto row = weights_[0].row(cursor.step);
  std::copy(row.begin(), row.end(), logits.begin());
  ++cursor.step;
}

void TablePolicy::accumulate_log_prob_grad(std::span<const std::size_t> actions, double tau,
                                           double scale, ParamSet& grad) const {
  validate_actions(actions);
  ModulePool used;
  for (std::size_t t = 0; t < actions.size(); ++t) {
    const auto row = weights_[0].row(t);
    const ActionMask mask = allowed_actions(used);
    if (!mask.test(actions[t])) throw InvalidArgument("masked action in sequence");
    const Distribution p = masked_softmax(row, mask, tau);
    auto g = grad[0].row(t);
    for (std::size_t a = 0; a < kNumActions; ++a) {
      if (!mask.test(a)) continue;
      g[a] += scale * ((a == actions[t] ? 1.0 : 0.0) - p[a]) / tau;
    }
    if (actions[t] < kNumModules) used.set(actions[t]);
  }
}

std::unique_ptr<SequencePolicy> make_policy(std::string_view kind, std::uint64_t seed,
                                            const ModulePool& pool, const GruPolicyConfig& gru) {
  if (kind == "gru") return std::make_unique<GruPolicy>(seed, gru, pool);
  if (kind == "table") return std::make_unique<TablePolicy>(pool);
  throw InvalidArgument("unknown policy kind '" + std::string(kind) + "' (expected gru or table)");
}

}  // namespace seqisp
