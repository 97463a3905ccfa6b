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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqisp/kernels.hpp"
#include "seqisp/objective.hpp"
#include "seqisp/oracle.hpp"
#include "seqisp/pipeline.hpp"
#include "seqisp/policy.hpp"
#include "seqisp/predictor.hpp"
#include "seqisp/trainer.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace seqisp;
using seqisp::testing::central_diff;
using seqisp::testing::random_image;
using seqisp::testing::rel_error;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double max_abs_diff(const Image& a, const Image& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double weighted_sum(const Image& a, const Image& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * w[i];
  return acc;
}

Image random_upstream(std::uint64_t seed, std::size_t h, std::size_t w) {
  Rng rng(seed);
  Image up(h, w);
  for (std::size_t i = 0; i < up.size(); ++i) up[i] = rng.uniform(-1.0, 1.0);
  return up;
}

// ------------------------------------------------------------------ 1

Outcome identity_suite() {
  const auto start = Clock::now();
  const Image img = random_image(101, 8, 8);
  const double sharpen_one = (1.0 - 1e-5) / (10.0 - 1e-5);
  const std::vector<std::pair<ModuleId, std::vector<double>>> cases{
      {ModuleId::Exposure, {0.5}},
      {ModuleId::Gamma, {0.5}},
      {ModuleId::ToneMap, std::vector<double>(8, 0.3)},
      {ModuleId::Contrast, {0.5}},
      {ModuleId::Saturation, {0.0}},
      {ModuleId::Desaturation, {0.0}},
      {ModuleId::WhiteBalance, {0.7, 0.7, 0.7}},
      {ModuleId::SharpenBlur, {sharpen_one}},
      {ModuleId::ColorCorrection, {0.75, 0.5, 0.5, 0.5, 0.75, 0.5, 0.5, 0.5, 0.75}},
  };
  double worst = 0.0;
  for (const auto& [id, raw] : cases) {
    worst = std::max(worst, max_abs_diff(module_forward(id, img, raw), img));
  }
  // denoise only fixes constant images
  const Image flat(8, 8, 0.4);
  const double dn = max_abs_diff(module_forward(ModuleId::Denoise, flat, std::vector{0.6}), flat);
  const double elapsed = seconds_since(start);
  return {worst <= 1e-9 && dn <= 1e-9 && elapsed < 1.0,
          format("9 configs max |diff| %.3g, constant denoise %.3g, %.3f s", worst, dn, elapsed)};
}

// ------------------------------------------------------------------ 2

struct GradTally {
  std::map<std::string, double> worst;
  void add(const std::string& what, double err) {
    auto& w = worst[what];
    w = std::max(w, err);
  }
  double overall() const {
    double w = 0.0;
    for (const auto& [k, v] : worst) w = std::max(w, v);
    return w;
  }
};

void check_kernels(GradTally& tally) {
  for (ModuleId id : kAllModules) {
    if (id == ModuleId::Denoise) continue;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const std::uint64_t seed = 200 + 10 * index_of(id) + s;
      Image img = random_image(seed, 8, 8);
      const Image up = random_upstream(seed + 1000, 8, 8);
      Rng rng(seed + 2000);
      std::vector<double> raw(param_count(id));
      for (auto& v : raw) v = rng.uniform(0.2, 0.8);
      const auto g = module_vjp(id, img, raw, up);
      auto loss = [&] { return weighted_sum(module_forward(id, img, raw), up); };
      const std::string name(module_name(id));
      for (std::size_t k = 0; k < raw.size(); ++k) {
        tally.add(name, rel_error(g.d_params[k], central_diff(loss, raw[k], 1e-5)));
      }
      for (std::size_t i = 0; i < img.size(); ++i) {
        tally.add(name, rel_error(g.d_input[i], central_diff(loss, img[i], 1e-5)));
      }
    }
  }
}

GruPolicyConfig small_gru() {
  GruPolicyConfig c;
  c.hidden = 6;
  c.token_embed = 4;
  c.step_embed = 3;
  c.film_hidden = 5;
  return c;
}

void randomize(SequencePolicy& policy, std::uint64_t seed, double scale) {
  Rng rng(seed);
  for (std::size_t i = 0; i < policy.weights().size(); ++i) {
    policy.weights()[i].fill_uniform(rng, scale);
  }
}

std::vector<double> random_vector(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void check_policy(GradTally& tally) {
  GruPolicy p(301, small_gru());
  randomize(p, 302, 0.6);

  auto h_prev = random_vector(303, 6);
  const auto coeff = random_vector(304, 6);
  {
    auto loss = [&] { return dot(coeff, p.gru_step(h_prev, 5).h); };
    ParamSet grad = p.weights().zeros_like();
    const auto g_prev = p.gru_step_backward(p.gru_step(h_prev, 5), coeff, grad);
    for (std::size_t t = 0; t <= GruPolicy::kBh; ++t) {
      for (std::size_t i = 0; i < p.weights()[t].size(); ++i) {
        tally.add("gru", rel_error(grad[t][i], central_diff(loss, p.weights()[t][i], 1e-5)));
      }
    }
    for (std::size_t i = 0; i < h_prev.size(); ++i) {
      tally.add("gru", rel_error(g_prev[i], central_diff(loss, h_prev[i], 1e-5)));
    }
  }
  {
    auto loss = [&] { return dot(coeff, p.film_modulate(h_prev, 3).out); };
    ParamSet grad = p.weights().zeros_like();
    const auto g_h = p.film_backward(p.film_modulate(h_prev, 3), coeff, grad);
    for (std::size_t t = GruPolicy::kStepEmbedding; t <= GruPolicy::kFilmB2; ++t) {
      for (std::size_t i = 0; i < p.weights()[t].size(); ++i) {
        tally.add("film", rel_error(grad[t][i], central_diff(loss, p.weights()[t][i], 1e-5)));
      }
    }
    for (std::size_t i = 0; i < h_prev.size(); ++i) {
      tally.add("film", rel_error(g_h[i], central_diff(loss, h_prev[i], 1e-5)));
    }
  }
  {
    // REINFORCE loss of a two-sequence batch through the whole unrolled policy
    std::vector<SampledSequence> batch(2);
    batch[0].actions = {3, 0, 8, kEndAction};
    batch[1].actions = {6, 1, kEndAction};
    for (auto& s : batch) s.temperature = 1.7;
    const std::vector<double> rewards{0.8, -0.3};
    const ParamSet grad = p.backward(batch, rewards);
    auto loss = [&] {
      std::vector<double> lp;
      for (const auto& s : batch) {
        const auto d = p.forced_distributions(s.actions, s.temperature);
        double acc = 0.0;
        for (std::size_t t = 0; t < s.actions.size(); ++t) acc += std::log(d[t][s.actions[t]]);
        lp.push_back(acc);
      }
      return reinforce_loss(rewards, lp);
    };
    for (std::size_t k = 0; k < p.weights().num_values(); ++k) {
      tally.add("policy", rel_error(grad.flat(k), central_diff(loss, p.weights().flat(k), 1e-5)));
    }
  }
}

void check_predictor(GradTally& tally) {
  PredictorConfig c;
  c.channels = 2;
  c.latent = 4;
  c.head_hidden = 8;
  c.input_size = 16;
  ParamPredictor p(401, c);
  Image img = random_image(402, 16, 16);
  const auto up = random_vector(403, kTotalParams);
  ParamSet grad = p.weights().zeros_like();
  Image d_img;
  p.backward(img, p.forward(img), up, grad, &d_img);
  auto loss = [&] { return dot(up, p.forward(img).output); };
  for (std::size_t k = 0; k < p.weights().num_values(); ++k) {
    tally.add("predictor", rel_error(grad.flat(k), central_diff(loss, p.weights().flat(k), 1e-5)));
  }
  for (std::size_t i = 0; i < img.size(); i += 5) {
    tally.add("predictor", rel_error(d_img[i], central_diff(loss, img[i], 1e-5)));
  }
}

void check_losses(GradTally& tally) {
  const MseTask task;
  const PenaltyConfig cfg;
  const Image target = random_image(501, 8, 8);
  // mid range, then dark and bright enough to sit inside each hinge
  const std::vector<std::pair<double, double>> ranges{{0.1, 0.9}, {0.0, 0.01}, {0.9, 1.0}};
  for (std::size_t r = 0; r < ranges.size(); ++r) {
    Image out = random_image(502 + r, 8, 8, ranges[r].first, ranges[r].second);
    const Image g_task = task.loss_grad(out, target);
    const Image g_pen = penalty_grad(out, cfg);
    const ParamLoss pl = param_loss(out, target, task, cfg, 2);
    auto task_loss = [&] { return task.loss(out, target); };
    auto pen_loss = [&] { return penalty(out, cfg, 2); };
    auto total = [&] { return param_loss(out, target, task, cfg, 2).value; };
    for (std::size_t i = 0; i < out.size(); ++i) {
      tally.add("mse", rel_error(g_task[i], central_diff(task_loss, out[i], 1e-5)));
      tally.add("penalty", rel_error(g_pen[i], central_diff(pen_loss, out[i], 1e-5)));
      tally.add("param_loss", rel_error(pl.grad[i], central_diff(total, out[i], 1e-5)));
    }
  }
}

void check_pipeline(GradTally& tally) {
  const MseTask task;
  const PipelineSequence seq{ModuleId::ToneMap, ModuleId::WhiteBalance, ModuleId::Exposure,
                             ModuleId::Contrast, ModuleId::Gamma};
  const Image img = random_image(601, 8, 8, 0.2, 0.7);
  const Image target = random_image(602, 8, 8);
  Rng rng(603);
  std::vector<double> raw(kTotalParams);
  for (auto& v : raw) v = rng.uniform(0.4, 0.6);
  const auto res = apply_pipeline(img, seq, ParamVector(raw));
  const auto grad = pipeline_backward(res.trace, task.loss_grad(res.output, target));
  auto loss = [&] { return task.loss(run_pipeline(img, seq, ParamVector(raw)), target); };
  for (std::size_t k = 0; k < kTotalParams; ++k) {
    tally.add("pipeline", rel_error(grad[k], central_diff(loss, raw[k], 1e-5)));
  }
}

Outcome gradient_suite() {
  const auto start = Clock::now();
  GradTally tally;
  check_kernels(tally);
  check_policy(tally);
  check_predictor(tally);
  check_losses(tally);
  check_pipeline(tally);
  const double elapsed = seconds_since(start);
  std::string worst_name;
  double worst = -1.0;
  for (const auto& [k, v] : tally.worst) {
    if (v > worst) worst = v, worst_name = k;
  }
  return {tally.overall() <= 1e-4 && elapsed < 60.0,
          format("%zu groups, worst rel err %.3g (%s), %.2f s", tally.worst.size(), worst,
                 worst_name.c_str(), elapsed)};
}

// ------------------------------------------------------------------ 3

Outcome spot_values() {
  std::vector<std::string> failed;
  auto expect = [&](const char* what, double got, double want, double tol) {
    if (!(std::abs(got - want) <= tol)) failed.push_back(format("%s=%.9g", what, got));
  };
  const Image dim(1, 1, 0.05);
  expect("exposure", exposure_forward(dim, std::vector{1.0})[0], 0.565685, 1e-6);

  std::vector<double> tone(8, 0.0);
  tone[0] = 1.0;  // rescaled (2, 0.5 x 7)
  expect("tone", tonemap_forward(dim, tone)[0], 0.145455, 1e-6);

  const double lo = 1.0 / 1.1;
  const std::vector<double> wb{1.0, 0.0, (1.0 - lo) / (1.1 - lo)};
  const Image wb_out = whitebalance_forward(Image(1, 1, 0.5), wb);
  expect("wb.r", wb_out[0], 0.569305, 1e-5);
  expect("wb.g", wb_out[1], 0.470502, 1e-5);
  expect("wb.b", wb_out[2], 0.517550, 1e-5);

  if (temperature(0) != 2.5) failed.push_back(format("tau(0)=%.17g", temperature(0)));
  expect("tau(3000)", temperature(3000), 1.35, 1e-12);

  const PenaltyConfig cfg;
  const double low = penalty(Image(2, 2, 0.005), cfg, 0);
  if (low != 0.005) failed.push_back(format("low hinge=%.17g", low));
  // 0.95 - 0.9 is not 0.05 in binary64; allow a few ulps
  expect("high hinge", penalty(Image(2, 2, 0.95), cfg, 0), 0.05, 1e-15);

  std::string detail = failed.empty() ? "exposure, tone, white balance, tau, hinges" : "";
  for (const auto& f : failed) detail += f + " ";
  return {failed.empty(), detail};
}

// ------------------------------------------------------------------ 4

Outcome policy_structure() {
  std::vector<std::string> failed;
  GruPolicy fresh(701);
  double dev = 0.0;
  for (double tau : {0.2, 1.0, 2.5}) {
    const std::size_t first[] = {kEndAction};
    const auto d = fresh.forced_distributions(first, tau)[0];
    for (double p : d) dev = std::max(dev, std::abs(p - 1.0 / 11.0));
  }
  if (dev > 1e-12) failed.push_back(format("uniform dev %.3g", dev));

  GruPolicy trained(702);
  randomize(trained, 703, 0.5);
  std::size_t bad = 0, longest = 0;
  for (const SequencePolicy* p : {static_cast<const SequencePolicy*>(&fresh),
                                  static_cast<const SequencePolicy*>(&trained)}) {
    Rng rng(704);
    for (int i = 0; i < 10000; ++i) {
      const auto s = p->sample(2.5, rng);
      std::set<std::size_t> seen;
      for (std::size_t a = 0; a + 1 < s.actions.size(); ++a) {
        if (s.actions[a] >= kNumModules || !seen.insert(s.actions[a]).second) ++bad;
      }
      if (s.actions.empty() || s.actions.back() != kEndAction) ++bad;
      longest = std::max(longest, s.actions.size());
    }
  }
  if (bad > 0) failed.push_back(format("%zu invalid samples", bad));
  if (longest > 11) failed.push_back(format("longest %zu tokens", longest));

  const auto reference = trained.greedy_decode();
  for (double tau : {0.2, 1.0, 2.5, 10.0}) {
    const auto trace = trained.greedy_trace(tau);
    std::vector<ModuleId> steps;
    for (const auto& st : trace) {
      if (st.action != kEndAction) steps.push_back(static_cast<ModuleId>(st.action));
    }
    if (PipelineSequence(steps) != reference) failed.push_back(format("greedy differs at tau %g", tau));
  }
  if (trained.greedy_decode() != reference) failed.push_back("greedy not repeatable");

  std::string detail = failed.empty()
                           ? format("uniform dev %.3g, 20000 samples valid, longest %zu tokens, "
                                    "greedy '%s' stable",
                                    dev, longest, reference.to_string().c_str())
                           : "";
  for (const auto& f : failed) detail += f + "; ";
  return {failed.empty(), detail};
}

// ------------------------------------------------------------------ 5-8

const PipelineSequence kPoolSeq{ModuleId::Exposure, ModuleId::WhiteBalance, ModuleId::Gamma};

TrainConfig end_to_end_config(const std::string& policy, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.task = "synth_restore";
  cfg.n_train = 200;
  cfg.n_eval = 16;
  cfg.image_size = 64;
  cfg.iterations = 3000;
  cfg.batch_size = 8;
  cfg.policy = policy;
  cfg.seed = seed;
  cfg.pool.reset();
  for (ModuleId id : kPoolSeq.steps()) cfg.pool.set(index_of(id));
  cfg.validate();
  return cfg;
}

struct Run {
  std::string policy;
  std::uint64_t seed = 0;
  fs::path dir;
  std::vector<MetricsRow> rows;
  EvalResult eval;
  double seconds = 0.0;
};

class EndToEnd {
 public:
  EndToEnd(fs::path work, std::size_t threads) : work_(std::move(work)), threads_(threads) {}

  const Dataset& data() {
    if (data_.train.empty()) data_ = load_task_data(end_to_end_config("gru", 1));
    return data_;
  }

  const OracleResult& oracle() {
    if (!oracle_) {
      const auto cfg = end_to_end_config("gru", 1);
      OracleOptions opt;
      opt.grid = cfg.oracle_grid;
      opt.rounds = cfg.oracle_rounds;
      opt.penalty = cfg.penalty;
      opt.threads = threads_;
      const auto task = make_task(cfg.task);
      oracle_ = oracle_best(kPoolSeq.steps(), data().eval, *task, opt);
    }
    return *oracle_;
  }

  const Run& run(const std::string& policy, std::uint64_t seed) {
    const std::string key = policy + "_seed" + std::to_string(seed);
    auto it = runs_.find(key);
    if (it != runs_.end()) return it->second;
    Run r;
    r.policy = policy;
    r.seed = seed;
    r.dir = work_ / key;
    fs::remove_all(r.dir);
    const auto start = Clock::now();
    Trainer trainer(end_to_end_config(policy, seed), data(), threads_);
    r.rows = trainer.run(r.dir);
    r.eval = trainer.evaluate();
    r.seconds = seconds_since(start);
    std::printf("  run %-12s %7.1f s  reward %.5f  psnr %.2f -> %.2f dB  greedy '%s'\n",
                key.c_str(), r.seconds, r.eval.reward, r.eval.input_psnr, r.eval.psnr,
                r.eval.sequence.to_string().c_str());
    std::fflush(stdout);
    return runs_.emplace(key, std::move(r)).first->second;
  }

  std::vector<const Run*> runs(const std::string& policy) {
    std::vector<const Run*> out;
    for (std::uint64_t s : kSeeds) out.push_back(&run(policy, s));
    return out;
  }

  const Run& median_gru() {
    auto all = runs("gru");
    std::sort(all.begin(), all.end(),
              [](const Run* a, const Run* b) { return a->eval.reward < b->eval.reward; });
    return *all[1];
  }

  const fs::path& work() const { return work_; }
  std::size_t threads() const { return threads_; }

  static constexpr std::uint64_t kSeeds[] = {1, 2, 3};

 private:
  fs::path work_;
  std::size_t threads_;
  Dataset data_;
  std::optional<OracleResult> oracle_;
  std::map<std::string, Run> runs_;
};

Outcome oracle_equivalence(EndToEnd& e2e) {
  const auto& oracle = e2e.oracle();
  std::printf("  oracle best '%s' reward %.5f\n", oracle.best_sequence.to_string().c_str(),
              oracle.best_reward);
  double total = 0.0;
  for (const Run* r : e2e.runs("gru")) total += r->seconds;
  const Run& med = e2e.median_gru();
  const double gain = med.eval.psnr - med.eval.input_psnr;
  const double ratio = med.eval.reward / oracle.best_reward;
  const bool pass = ratio >= 0.9 && gain >= 3.0 && total <= 1200.0;
  return {pass, format("median seed %llu: reward %.5f = %.3f x oracle %.5f (need >= 0.9), "
                       "psnr +%.2f dB (need >= 3), 3 runs %.0f s (limit 1200)",
                       static_cast<unsigned long long>(med.seed), med.eval.reward, ratio,
                       oracle.best_reward, gain, total)};
}

Outcome training_dynamics(EndToEnd& e2e) {
  for (const Run* r : e2e.runs("gru")) {
    const auto& a = r->rows.front();
    const auto& b = r->rows.back();
    std::printf("  seed %llu: entropy %.4f -> %.4f, likelihood ratio %.2f\n",
                static_cast<unsigned long long>(r->seed), a.policy_entropy, b.policy_entropy,
                std::exp(b.greedy_log_prob - a.greedy_log_prob));
  }
  const Run& med = e2e.median_gru();
  const auto& first = med.rows.front();
  const auto& last = med.rows.back();
  const double initial = first.policy_entropy;
  const double final_entropy = last.policy_entropy;
  const double ratio = std::exp(last.greedy_log_prob - first.greedy_log_prob);
  const bool entropy_ok = final_entropy < 0.5 * initial;
  const bool likelihood_ok = ratio >= 10.0;
  return {entropy_ok && likelihood_ok,
          format("median seed %llu: entropy %.4f -> %.4f (need < %.4f; vs 0.5 ln 11 = %.4f: %s), "
                 "likelihood ratio %.2f (need >= 10)",
                 static_cast<unsigned long long>(med.seed), initial, final_entropy, 0.5 * initial,
                 0.5 * std::log(11.0), final_entropy < 0.5 * std::log(11.0) ? "below" : "above",
                 ratio)};
}

Outcome ablation_direction(EndToEnd& e2e) {
  auto mean_reward = [](const std::vector<const Run*>& runs) {
    double acc = 0.0;
    for (const Run* r : runs) acc += r->eval.reward;
    return acc / static_cast<double>(runs.size());
  };
  const double gru = mean_reward(e2e.runs("gru"));
  const double table = mean_reward(e2e.runs("table"));
  return {gru >= table, format("mean final reward gru %.5f, table %.5f", gru, table)};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(EndToEnd& e2e) {
  const Run& med = e2e.median_gru();
  const auto cfg = end_to_end_config("gru", med.seed);
  const std::string reference_csv = read_file(med.dir / "metrics.csv");
  const std::string reference_ckpt = read_file(med.dir / "final.ckpt");

  const fs::path repeat = e2e.work() / "determinism_repeat";
  fs::remove_all(repeat);
  {
    Trainer again(cfg, e2e.data(), e2e.threads());
    again.run(repeat);
  }
  const bool same_csv = read_file(repeat / "metrics.csv") == reference_csv;

  // resume from the halfway checkpoint with the rows logged before it
  const std::uint64_t mid = cfg.iterations / 2;
  const fs::path resumed = e2e.work() / "determinism_resume";
  fs::remove_all(resumed);
  fs::create_directories(resumed);
  {
    std::istringstream lines(reference_csv);
    std::ofstream out(resumed / "metrics.csv", std::ios::binary);
    std::string line;
    std::getline(lines, line);
    out << line << "\n";
    while (std::getline(lines, line)) {
      if (std::stoull(line.substr(0, line.find(','))) >= mid) break;
      out << line << "\n";
    }
  }
  char name[32];
  std::snprintf(name, sizeof name, "ckpt_%06llu.ckpt", static_cast<unsigned long long>(mid));
  {
    Trainer trainer(cfg, e2e.data(), e2e.threads());
    trainer.load(med.dir / name);
    trainer.run(resumed);
  }
  const bool resume_csv = read_file(resumed / "metrics.csv") == reference_csv;
  const bool resume_ckpt = read_file(resumed / "final.ckpt") == reference_ckpt;
  return {same_csv && resume_csv && resume_ckpt,
          format("rerun csv %s; resume from iteration %llu: csv %s, final checkpoint %s",
                 same_csv ? "identical" : "DIFFERS", static_cast<unsigned long long>(mid),
                 resume_csv ? "identical" : "DIFFERS", resume_ckpt ? "identical" : "DIFFERS")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seqisp acceptance checks"};
  std::string work = "acceptance_runs";
  std::size_t threads = 1;
  std::vector<int> only;
  app.add_option("--work-dir", work, "Directory for training runs");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--criteria", only, "Subset of criteria to run")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  EndToEnd e2e(work, threads);
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, identity_suite},
      {2, gradient_suite},
      {3, spot_values},
      {4, policy_structure},
      {5, [&] { return oracle_equivalence(e2e); }},
      {6, [&] { return training_dynamics(e2e); }},
      {7, [&] { return ablation_direction(e2e); }},
      {8, [&] { return determinism(e2e); }},
  };
  int failures = 0;
  for (const auto& [id, check] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
