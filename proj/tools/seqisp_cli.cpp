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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "seqisp/config.hpp"
#include "seqisp/error.hpp"
#include "seqisp/oracle.hpp"
#include "seqisp/trainer.hpp"

namespace {

using namespace seqisp;

std::string module_label(std::size_t action) {
  if (action == kEndAction) return "End";
  return std::string(module_name(static_cast<ModuleId>(action)));
}

int cmd_gen_data(const std::string& config_path, const std::string& out) {
  const TrainConfig cfg = load_config(config_path);
  const Dataset data = make_dataset(cfg.data_seed, cfg.n_train, cfg.n_eval, cfg.image_size);
  save_dataset(data, out);
  std::printf("wrote %zu train and %zu eval pairs to %s\n", data.train.size(), data.eval.size(),
              out.c_str());
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& out_dir,
              const std::string& resume, std::size_t threads) {
  const TrainConfig cfg = load_config(config_path);
  Trainer trainer(cfg, load_task_data(cfg), threads);
  if (!resume.empty()) trainer.load(resume);
  trainer.run(out_dir, [](const MetricsRow& row) {
    std::printf("iter %6llu  tau %.4f  reward %+.6f  entropy %.4f  eval_psnr %.3f  [%s]\n",
                static_cast<unsigned long long>(row.iter), row.tau, row.mean_reward,
                row.policy_entropy, row.eval_psnr, row.greedy_pipeline.c_str());
    std::fflush(stdout);
  });
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& config_path, std::size_t threads) {
  const TrainConfig cfg = load_config(config_path);
  const Model model = load_model(checkpoint);
  const Dataset data = load_task_data(cfg);
  const auto task = make_task(cfg.task);
  const EvalResult r = evaluate(*model.policy, model.predictor, data.eval, *task, cfg.penalty,
                                threads);
  std::printf("pipeline: %s\n", r.sequence.empty() ? "(empty)" : r.sequence.to_string().c_str());
  std::printf("mean_mse: %.8f\nmean_psnr: %.4f\nmean_reward: %.8f\n", r.mse, r.psnr, r.reward);
  std::printf("input_mse: %.8f\ninput_psnr: %.4f\n", r.input_mse, r.input_psnr);
  return 0;
}

int cmd_apply(const std::string& checkpoint, const std::string& input, const std::string& output) {
  const Model model = load_model(checkpoint);
  const Image img = load_ppm(input);
  const PipelineSequence seq = model.policy->greedy_decode();
  const ParamVector params = model.predictor.predict(img);
  save_ppm(run_pipeline(img, seq, params), output);
  std::printf("applied: %s\n", seq.empty() ? "(empty)" : seq.to_string().c_str());
  return 0;
}

int cmd_decode(const std::string& checkpoint) {
  const Model model = load_model(checkpoint);
  const auto trace = model.policy->greedy_trace(1.0);
  for (std::size_t t = 0; t < trace.size(); ++t) {
    std::printf("step %zu: %s\n", t + 1, module_label(trace[t].action).c_str());
    for (std::size_t a = 0; a < kNumActions; ++a) {
      std::printf("  %-16s %.4f\n", module_label(a).c_str(), trace[t].probs[a]);
    }
  }
  std::printf("pipeline: %s\n", model.policy->greedy_decode().to_string().c_str());
  return 0;
}

int cmd_oracle(const std::string& config_path, const std::string& out, std::size_t threads) {
  const TrainConfig cfg = load_config(config_path);
  std::vector<ModuleId> pool;
  for (ModuleId id : kAllModules) {
    if (cfg.pool.test(index_of(id))) pool.push_back(id);
  }
  const Dataset data = load_task_data(cfg);
  const auto task = make_task(cfg.task);
  OracleOptions opt;
  opt.grid = cfg.oracle_grid;
  opt.rounds = cfg.oracle_rounds;
  opt.penalty = cfg.penalty;
  opt.threads = threads;
  const OracleResult res = oracle_best(pool, data.eval, *task, opt);
  std::ofstream csv(out, std::ios::trunc);
  if (!csv) throw IoError("cannot open " + out + " for writing");
  csv << "sequence,reward\n";
  char buf[40];
  for (const auto& [seq, r] : res.table) {
    std::snprintf(buf, sizeof buf, "%.12g", r);
    csv << '"' << seq.to_string() << "\"," << buf << "\n";
  }
  std::printf("best: %s  reward %.8f\n", res.best_sequence.to_string().c_str(), res.best_reward);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequence-searched ISP pipelines: data, training, evaluation and search"};
  app.require_subcommand(1);
  std::size_t threads = 1;
  app.add_option("--threads", threads, "Worker threads for batch and search work")
      ->check(CLI::PositiveNumber);

  std::string config, out, out_dir, checkpoint, input, output, resume;

  auto* gen = app.add_subcommand("gen-data", "Write synthetic PPM pairs");
  gen->add_option("--config", config)->required();
  gen->add_option("--out", out)->required();

  auto* train = app.add_subcommand("train", "Train policy and parameter predictor");
  train->add_option("--config", config)->required();
  train->add_option("--out-dir", out_dir)->required();
  train->add_option("--resume", resume, "Continue from a checkpoint");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the eval split");
  eval->add_option("--checkpoint", checkpoint)->required();
  eval->add_option("--config", config)->required();

  auto* apply = app.add_subcommand("apply", "Run the greedy pipeline on one image");
  apply->add_option("--checkpoint", checkpoint)->required();
  apply->add_option("--input", input)->required();
  apply->add_option("--output", output)->required();

  auto* decode = app.add_subcommand("decode", "Print the greedy sequence and its distributions");
  decode->add_option("--checkpoint", checkpoint)->required();

  auto* oracle = app.add_subcommand("oracle", "Brute-force search over a small module pool");
  oracle->add_option("--config", config)->required();
  oracle->add_option("--out", out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(config, out);
    if (train->parsed()) return cmd_train(config, out_dir, resume, threads);
    if (eval->parsed()) return cmd_eval(checkpoint, config, threads);
    if (apply->parsed()) return cmd_apply(checkpoint, input, output);
    if (decode->parsed()) return cmd_decode(checkpoint);
    if (oracle->parsed()) return cmd_oracle(config, out, threads);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
