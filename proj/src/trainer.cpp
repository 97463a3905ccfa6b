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

#include "seqisp/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "seqisp/error.hpp"
#include "seqisp/parallel.hpp"

namespace seqisp {

namespace {

constexpr std::uint64_t kBatchStream = 1;
constexpr std::uint64_t kSamplerStream = 1000;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void require_finite(double v, const std::string& what, std::uint64_t t) {
  if (!std::isfinite(v)) {
    throw NumericError("non-finite " + what + " at iteration " + std::to_string(t));
  }
}

void require_finite(const ParamSet& g, const std::string& what, std::uint64_t t) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g[i].all_finite()) {
      throw NumericError("non-finite " + what + " (" + g.name(i) + ") at iteration " +
                         std::to_string(t));
    }
  }
}

bool is_policy_tensor(const std::string& name) {
  return name.starts_with("gru.") || name.starts_with("film.") ||
         name.starts_with("decoder.") || name.starts_with("table.");
}

ParamSet collect(const TensorArchive& archive, bool (*keep)(const std::string&)) {
  ParamSet set;
  for (const auto& [name, t] : archive.records()) {
    if (!keep(name)) continue;
    const std::size_t i = set.add(name, t.shape);
    set[i] = t;
  }
  return set;
}

ModulePool pool_from_archive(const TensorArchive& archive) {
  const auto mask = static_cast<unsigned long>(archive.get_scalar("meta.pool_mask"));
  return ModulePool(mask);
}

std::unique_ptr<SequencePolicy> policy_from_archive(const TensorArchive& archive) {
  const ModulePool pool = pool_from_archive(archive);
  ParamSet weights = collect(archive, is_policy_tensor);
  if (weights.find("table.logits") != weights.size()) {
    return std::make_unique<TablePolicy>(TablePolicy::from_weights(std::move(weights), pool));
  }
  return std::make_unique<GruPolicy>(GruPolicy::from_weights(std::move(weights), pool));
}

}  // namespace

std::string metrics_header() {
  return "iter,tau,mean_reward,reinforce_loss,param_loss,policy_entropy,greedy_pipeline,"
         "greedy_log_prob,eval_mse,eval_psnr";
}

std::string format_metrics_row(const MetricsRow& r) {
  return std::to_string(r.iter) + "," + fmt(r.tau) + "," + fmt(r.mean_reward) + "," +
         fmt(r.reinforce_loss) + "," + fmt(r.param_loss) + "," + fmt(r.policy_entropy) + ",\"" +
         r.greedy_pipeline + "\"," + fmt(r.greedy_log_prob) + "," + fmt(r.eval_mse) + "," +
         fmt(r.eval_psnr);
}

Model load_model(const std::filesystem::path& path) {
  const TensorArchive archive = TensorArchive::load(path);
  Model m;
  m.policy = policy_from_archive(archive);
  m.predictor = ParamPredictor::from_weights(
      collect(archive, [](const std::string& n) { return n.starts_with("predictor."); }),
      archive.contains("meta.predictor_input_size")
          ? static_cast<std::size_t>(archive.get_scalar("meta.predictor_input_size"))
          : PredictorConfig{}.input_size);
  return m;
}

EvalResult evaluate(const SequencePolicy& policy, const ParamPredictor& predictor,
                    std::span<const Sample> samples, const TaskLoss& task,
                    const PenaltyConfig& penalty, std::size_t threads) {
  EvalResult res;
  res.sequence = policy.greedy_decode();
  const std::size_t n = samples.size();
  if (n == 0) return res;
  std::vector<std::array<double, 5>> per(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const Sample& s = samples[i];
    const ParamVector params = predictor.predict(s.input);
    const Image out = run_pipeline(s.input, res.sequence, params);
    const double m = task.loss(out, s.target);
    const double m_in = task.loss(s.input, s.target);
    per[i] = {m, psnr_from_mse(mse(out, s.target)),
              reward(s.input, out, s.target, task, penalty, res.sequence.size()), m_in,
              psnr_from_mse(mse(s.input, s.target))};
  });
  for (const auto& p : per) {
    res.mse += p[0];
    res.psnr += p[1];
    res.reward += p[2];
    res.input_mse += p[3];
    res.input_psnr += p[4];
  }
  const double inv = 1.0 / static_cast<double>(n);
  res.mse *= inv;
  res.psnr *= inv;
  res.reward *= inv;
  res.input_mse *= inv;
  res.input_psnr *= inv;
  return res;
}

Dataset load_task_data(const TrainConfig& cfg) {
  if (cfg.task == "enhance_mse") return load_dataset(cfg.data_dir);
  return make_dataset(cfg.data_seed, cfg.n_train, cfg.n_eval, cfg.image_size);
}

struct Trainer::Item {
  std::size_t index = 0;
  SampledSequence sample;
  ParamPredictor::Cache cache;
  PipelineResult result;
  double reward = 0.0;
  ParamLoss loss;
};

Trainer::Trainer(TrainConfig config, Dataset data, std::size_t threads)
    : config_(std::move(config)),
      data_(std::move(data)),
      threads_(threads == 0 ? 1 : threads),
      task_(make_task(config_.task)),
      policy_(make_policy(config_.policy, derive_seed(config_.seed, 0, 0x9011c7), config_.pool,
                          config_.gru)),
      predictor_(derive_seed(config_.seed, 0, 0x94ed), config_.predictor) {
  config_.validate();
  if (data_.train.empty()) throw InvalidArgument("training set is empty");
  policy_adam_ = Adam(policy_->weights(), {config_.lr_seq, config_.beta1, config_.beta2,
                                           config_.adam_eps});
  param_adam_ = Adam(predictor_.weights(), {config_.lr_param, config_.beta1, config_.beta2,
                                            config_.adam_eps});
}

std::vector<Trainer::Item> Trainer::forward(std::uint64_t t, double tau) const {
  const std::size_t batch = config_.batch_size;
  std::vector<Item> items(batch);
  Rng picker(derive_seed(config_.seed, t, kBatchStream));
  for (auto& item : items) item.index = static_cast<std::size_t>(picker.below(data_.train.size()));

  parallel_for(batch, threads_, [&](std::size_t b) {
    Item& item = items[b];
    const Sample& s = data_.train[item.index];
    Rng sampler(derive_seed(config_.seed, t, kSamplerStream + b));
    item.sample = policy_->sample(tau, sampler);
    item.cache = predictor_.forward(s.input);
    for (double v : item.cache.output) require_finite(v, "predictor output", t);
    item.result = apply_pipeline(s.input, item.sample.sequence, ParamVector(item.cache.output));
    const std::size_t len = item.sample.sequence.size();
    item.reward = reward(s.input, item.result.output, s.target, *task_, config_.penalty, len);
    item.loss = param_loss(item.result.output, s.target, *task_, config_.penalty, len);
  });
  return items;
}

Trainer::IterationStats Trainer::summarize(const std::vector<Item>& items, double tau) const {
  IterationStats st;
  st.tau = tau;
  std::vector<double> rewards, log_probs;
  for (const auto& item : items) {
    rewards.push_back(item.reward);
    log_probs.push_back(item.sample.log_prob());
    st.mean_reward += item.reward;
    st.param_loss += item.loss.value;
  }
  const double inv = 1.0 / static_cast<double>(items.size());
  st.mean_reward *= inv;
  st.param_loss *= inv;
  st.reinforce_loss = reinforce_loss(rewards, log_probs, config_.baseline);
  return st;
}

void Trainer::update(std::uint64_t t, const std::vector<Item>& items, double tau,
                     IterationStats& st) {
  const bool joint = config_.schedule == UpdateSchedule::kJoint;
  const bool do_policy = joint || t % 2 == 1;
  const bool do_params = joint || t % 2 == 0;

  if (do_policy) {
    std::vector<SampledSequence> samples;
    std::vector<double> rewards;
    for (const auto& item : items) {
      samples.push_back(item.sample);
      rewards.push_back(item.reward);
    }
    const ParamSet grad = policy_->backward(samples, rewards, config_.baseline);
    require_finite(grad, "policy gradient", t);
    policy_adam_.step(policy_->weights(), grad);
    st.policy_updated = true;
  }

  if (do_params) {
    const std::size_t batch = items.size();
    const double inv = 1.0 / static_cast<double>(batch);
    std::vector<ParamSet> grads(batch);
    parallel_for(batch, threads_, [&](std::size_t b) {
      const Item& item = items[b];
      auto d_params = pipeline_backward(item.result.trace, item.loss.grad);
      for (double& g : d_params) g *= inv;
      grads[b] = predictor_.weights().zeros_like();
      predictor_.backward(data_.train[item.index].input, item.cache, d_params, grads[b]);
    });
    ParamSet total = predictor_.weights().zeros_like();
    for (const auto& g : grads) total.add_scaled(g, 1.0);
    require_finite(total, "parameter-predictor gradient", t);
    param_adam_.step(predictor_.weights(), total);
    st.params_updated = true;
  }
  (void)tau;
}

Trainer::IterationStats Trainer::step() {
  const std::uint64_t t = iteration_;
  const double tau = config_.temperature.at(t);
  const auto items = forward(t, tau);
  IterationStats st = summarize(items, tau);
  require_finite(st.reinforce_loss, "reinforce loss", t);
  require_finite(st.param_loss, "parameter loss", t);
  update(t, items, tau, st);
  ++iteration_;
  return st;
}

MetricsRow Trainer::make_row(std::uint64_t t, const IterationStats& st) const {
  MetricsRow row;
  row.iter = t;
  row.tau = st.tau;
  row.mean_reward = st.mean_reward;
  row.reinforce_loss = st.reinforce_loss;
  row.param_loss = st.param_loss;
  row.policy_entropy = policy_->entropy(st.tau);
  const EvalResult ev = evaluate();
  row.greedy_pipeline = ev.sequence.to_string();
  row.greedy_log_prob = policy_->sequence_log_prob(ev.sequence, 1.0);
  row.eval_mse = ev.mse;
  row.eval_psnr = ev.psnr;
  return row;
}

std::vector<MetricsRow> Trainer::run(const std::filesystem::path& out_dir,
                                     const std::function<void(const MetricsRow&)>& on_row) {
  std::ofstream csv;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const auto path = out_dir / "metrics.csv";
    const bool fresh = iteration_ == 0 || !std::filesystem::exists(path);
    csv.open(path, fresh ? std::ios::trunc : std::ios::app);
    if (!csv) throw IoError("cannot open " + path.string() + " for writing");
    if (fresh) csv << metrics_header() << "\n";
  }
  std::vector<MetricsRow> rows;
  auto emit = [&](const MetricsRow& row) {
    rows.push_back(row);
    if (csv.is_open()) csv << format_metrics_row(row) << "\n" << std::flush;
    if (on_row) on_row(row);
  };

  const std::uint64_t end = config_.iterations;
  while (iteration_ <= end) {
    const std::uint64_t t = iteration_;
    const double tau = config_.temperature.at(t);
    const auto items = forward(t, tau);
    IterationStats st = summarize(items, tau);
    require_finite(st.reinforce_loss, "reinforce loss", t);
    require_finite(st.param_loss, "parameter loss", t);
    if (t % config_.eval_interval == 0 || t == end) emit(make_row(t, st));
    if (t == end) break;
    update(t, items, tau, st);
    ++iteration_;
    if (!out_dir.empty() && iteration_ % config_.eval_interval == 0 && iteration_ < end) {
      char name[32];
      std::snprintf(name, sizeof name, "ckpt_%06llu.ckpt",
                    static_cast<unsigned long long>(iteration_));
      save(out_dir / name);
    }
  }
  if (!out_dir.empty()) save(out_dir / "final.ckpt");
  return rows;
}

EvalResult Trainer::evaluate() const {
  return seqisp::evaluate(*policy_, predictor_, data_.eval, *task_, config_.penalty, threads_);
}

TensorArchive Trainer::to_archive() const {
  TensorArchive a;
  a.put_scalar("meta.iteration", static_cast<double>(iteration_));
  a.put_scalar("meta.seed_lo", static_cast<double>(config_.seed & 0xffffffffULL));
  a.put_scalar("meta.seed_hi", static_cast<double>(config_.seed >> 32));
  a.put_scalar("meta.pool_mask", static_cast<double>(policy_->pool().to_ulong()));
  a.put_scalar("meta.predictor_input_size", static_cast<double>(predictor_.config().input_size));
  a.put_set("", policy_->weights());
  a.put_set("", predictor_.weights());
  a.put_set("adam.policy.m/", policy_adam_.first_moment());
  a.put_set("adam.policy.v/", policy_adam_.second_moment());
  a.put_scalar("adam.policy.steps", static_cast<double>(policy_adam_.steps()));
  a.put_set("adam.param.m/", param_adam_.first_moment());
  a.put_set("adam.param.v/", param_adam_.second_moment());
  a.put_scalar("adam.param.steps", static_cast<double>(param_adam_.steps()));
  return a;
}

void Trainer::save(const std::filesystem::path& path) const { to_archive().save(path); }

void Trainer::load(const std::filesystem::path& path) { restore(TensorArchive::load(path)); }

void Trainer::restore(const TensorArchive& a) {
  // Reject records this trainer would silently ignore.
  std::size_t expected = 5 + 2;
  expected += policy_->weights().size() * 3 + predictor_.weights().size() * 3;
  for (const auto& [name, t] : a.records()) {
    const bool known = name.starts_with("meta.") || name.starts_with("adam.") ||
                       policy_->weights().find(name) != policy_->weights().size() ||
                       predictor_.weights().find(name) != predictor_.weights().size();
    if (!known) throw FormatError("checkpoint contains unknown tensor '" + name + "'");
  }
  if (a.records().size() != expected) {
    throw FormatError("checkpoint has " + std::to_string(a.records().size()) +
                      " tensors, expected " + std::to_string(expected));
  }
  const auto seed = static_cast<std::uint64_t>(a.get_scalar("meta.seed_lo")) |
                    (static_cast<std::uint64_t>(a.get_scalar("meta.seed_hi")) << 32);
  if (seed != config_.seed) throw FormatError("checkpoint seed does not match the configuration");
  if (pool_from_archive(a) != policy_->pool()) {
    throw FormatError("checkpoint module pool does not match the configuration");
  }
  if (a.get_scalar("meta.predictor_input_size") !=
      static_cast<double>(predictor_.config().input_size)) {
    throw FormatError("checkpoint predictor input size does not match the configuration");
  }
  a.get_set("", policy_->weights());
  a.get_set("", predictor_.weights());
  a.get_set("adam.policy.m/", policy_adam_.first_moment());
  a.get_set("adam.policy.v/", policy_adam_.second_moment());
  policy_adam_.set_steps(static_cast<std::uint64_t>(a.get_scalar("adam.policy.steps")));
  a.get_set("adam.param.m/", param_adam_.first_moment());
  a.get_set("adam.param.v/", param_adam_.second_moment());
  param_adam_.set_steps(static_cast<std::uint64_t>(a.get_scalar("adam.param.steps")));
  iteration_ = static_cast<std::uint64_t>(a.get_scalar("meta.iteration"));
}

}  // namespace seqisp
