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

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "seqisp/error.hpp"
#include "seqisp/kernels.hpp"
#include "seqisp/objective.hpp"
#include "seqisp/oracle.hpp"
#include "seqisp/pipeline.hpp"
#include "seqisp/policy.hpp"
#include "seqisp/predictor.hpp"
#include "seqisp/synth.hpp"
#include "seqisp/trainer.hpp"

namespace py = pybind11;
using namespace seqisp;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Image to_image(const Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) {
    throw InvalidArgument("expected an array of shape (height, width, 3)");
  }
  const auto h = static_cast<std::size_t>(a.shape(0));
  const auto w = static_cast<std::size_t>(a.shape(1));
  return Image(h, w, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const Image& img) {
  Array out({img.height(), img.width(), std::size_t{3}});
  std::copy(img.data().begin(), img.data().end(), out.mutable_data());
  return out;
}

ModuleId module_arg(const std::string& name) {
  const auto id = module_from_name(name);
  if (!id) throw InvalidArgument("unknown module '" + name + "'");
  return *id;
}

ParamVector params_arg(const std::vector<double>& raw) {
  if (raw.empty()) return ParamVector();
  return ParamVector(raw);
}

std::vector<Sample> samples_arg(const std::vector<std::pair<Array, Array>>& pairs) {
  std::vector<Sample> out;
  out.reserve(pairs.size());
  for (const auto& [in, target] : pairs) out.push_back({to_image(in), to_image(target)});
  return out;
}

py::dict row_to_dict(const MetricsRow& r) {
  py::dict d;
  d["iter"] = r.iter;
  d["tau"] = r.tau;
  d["mean_reward"] = r.mean_reward;
  d["reinforce_loss"] = r.reinforce_loss;
  d["param_loss"] = r.param_loss;
  d["policy_entropy"] = r.policy_entropy;
  d["greedy_pipeline"] = r.greedy_pipeline;
  d["greedy_log_prob"] = r.greedy_log_prob;
  d["eval_mse"] = r.eval_mse;
  d["eval_psnr"] = r.eval_psnr;
  return d;
}

py::dict eval_to_dict(const EvalResult& e) {
  py::dict d;
  d["pipeline"] = e.sequence.to_string();
  d["mse"] = e.mse;
  d["psnr"] = e.psnr;
  d["reward"] = e.reward;
  d["input_mse"] = e.input_mse;
  d["input_psnr"] = e.input_psnr;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Differentiable ISP modules, sequence policy and training loop.";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  std::vector<std::string> names;
  for (ModuleId id : kAllModules) names.emplace_back(module_name(id));
  m.attr("MODULES") = names;
  m.attr("PARAM_COUNTS") = std::vector<std::size_t>(kParamCounts.begin(), kParamCounts.end());
  m.attr("TOTAL_PARAMS") = kTotalParams;

  m.def(
      "module_forward",
      [](const std::string& name, const Array& img, const std::vector<double>& raw) {
        return to_array(module_forward(module_arg(name), to_image(img), raw));
      },
      py::arg("module"), py::arg("image"), py::arg("params"));
  m.def(
      "module_vjp",
      [](const std::string& name, const Array& img, const std::vector<double>& raw,
         const Array& upstream) {
        auto g = module_vjp(module_arg(name), to_image(img), raw, to_image(upstream));
        return py::make_tuple(to_array(g.d_input), g.d_params);
      },
      py::arg("module"), py::arg("image"), py::arg("params"), py::arg("upstream"),
      "Returns (d_image, d_params) for the scalar <upstream, forward(image, params)>.");

  m.def(
      "run_pipeline",
      [](const Array& img, const std::string& seq, const std::vector<double>& params) {
        return to_array(run_pipeline(to_image(img), PipelineSequence::parse(seq),
                                     params_arg(params)));
      },
      py::arg("image"), py::arg("pipeline"), py::arg("params") = std::vector<double>{},
      "Applies a comma-separated module list; empty params means all 0.5.");
  m.def(
      "pipeline_gradient",
      [](const Array& img, const std::string& seq, const std::vector<double>& params,
         const Array& target) {
        const MseTask task;
        const Image t = to_image(target);
        const auto res = apply_pipeline(to_image(img), PipelineSequence::parse(seq),
                                        params_arg(params));
        const auto grad = pipeline_backward(res.trace, task.loss_grad(res.output, t));
        return py::make_tuple(task.loss(res.output, t),
                              std::vector<double>(grad.begin(), grad.end()));
      },
      py::arg("image"), py::arg("pipeline"), py::arg("params"), py::arg("target"),
      "MSE against the target and its gradient with respect to all 27 raw parameters.");

  py::class_<PenaltyConfig>(m, "PenaltyConfig")
      .def(py::init<>())
      .def_readwrite("alpha_low", &PenaltyConfig::alpha_low)
      .def_readwrite("alpha_high", &PenaltyConfig::alpha_high)
      .def_readwrite("intensity_low", &PenaltyConfig::intensity_low)
      .def_readwrite("intensity_high", &PenaltyConfig::intensity_high)
      .def_readwrite("length_penalty", &PenaltyConfig::length_penalty);
  m.def(
      "penalty",
      [](const Array& out, const PenaltyConfig& cfg, std::size_t len) {
        return penalty(to_image(out), cfg, len);
      },
      py::arg("output"), py::arg("config") = PenaltyConfig{}, py::arg("length") = 0);
  m.def(
      "reward",
      [](const Array& in, const Array& out, const Array& target, const PenaltyConfig& cfg,
         std::size_t len) {
        return reward(to_image(in), to_image(out), to_image(target), MseTask(), cfg, len);
      },
      py::arg("input"), py::arg("output"), py::arg("target"),
      py::arg("config") = PenaltyConfig{}, py::arg("length") = 0);
  m.def(
      "temperature", [](std::uint64_t step) { return temperature(step); }, py::arg("step"));

  py::class_<SequencePolicy>(m, "SequencePolicy")
      .def_property_readonly("kind", [](const SequencePolicy& p) { return std::string(p.kind()); })
      .def("greedy_decode", [](const SequencePolicy& p) { return p.greedy_decode().to_string(); })
      .def(
          "distributions",
          [](const SequencePolicy& p, double tau) {
            std::vector<std::vector<double>> out;
            for (const auto& st : p.greedy_trace(tau)) {
              out.emplace_back(st.probs.begin(), st.probs.end());
            }
            return out;
          },
          py::arg("tau") = 1.0, "Masked action distributions along the greedy path.")
      .def(
          "sample",
          [](const SequencePolicy& p, double tau, std::uint64_t seed) {
            Rng rng(seed);
            const auto s = p.sample(tau, rng);
            return py::make_tuple(s.sequence.to_string(), s.log_prob());
          },
          py::arg("tau"), py::arg("seed"))
      .def(
          "sequence_log_prob",
          [](const SequencePolicy& p, const std::string& seq, double tau) {
            return p.sequence_log_prob(PipelineSequence::parse(seq), tau);
          },
          py::arg("pipeline"), py::arg("tau") = 1.0)
      .def("entropy", &SequencePolicy::entropy, py::arg("tau") = 1.0);

  m.def(
      "make_policy",
      [](const std::string& kind, std::uint64_t seed, const std::string& pool) {
        return make_policy(kind, seed, parse_pool(pool));
      },
      py::arg("kind") = "gru", py::arg("seed") = 0, py::arg("pool") = "");

  py::class_<ParamPredictor>(m, "ParamPredictor")
      .def(py::init([](std::uint64_t seed, std::size_t channels, std::size_t input_size) {
             PredictorConfig c;
             c.channels = channels;
             c.input_size = input_size;
             return ParamPredictor(seed, c);
           }),
           py::arg("seed") = 0, py::arg("channels") = 16, py::arg("input_size") = 64)
      .def("predict", [](const ParamPredictor& p, const Array& img) {
        const auto v = p.predict(to_image(img)).values();
        return std::vector<double>(v.begin(), v.end());
      });

  m.def(
      "generate_pair",
      [](std::uint64_t seed, std::uint64_t index, std::size_t size) {
        const auto pair = generate_pair(seed, index, size);
        return py::make_tuple(to_array(pair.input), to_array(pair.target));
      },
      py::arg("seed"), py::arg("index"), py::arg("size") = 64,
      "Deterministic (degraded input, clean target) pair.");

  m.def(
      "oracle_best",
      [](const std::string& pool, const std::vector<std::pair<Array, Array>>& pairs,
         std::size_t grid, std::size_t rounds) {
        const auto seq = PipelineSequence::parse(pool);
        const auto samples = samples_arg(pairs);
        OracleOptions opt;
        opt.grid = grid;
        opt.rounds = rounds;
        const auto res = oracle_best(seq.steps(), samples, MseTask(), opt);
        py::list table;
        for (const auto& [s, r] : res.table) table.append(py::make_tuple(s.to_string(), r));
        const auto p = res.best_params.values();
        return py::make_tuple(res.best_sequence.to_string(), res.best_reward,
                              std::vector<double>(p.begin(), p.end()), table);
      },
      py::arg("pool"), py::arg("samples"), py::arg("grid") = 21, py::arg("rounds") = 3,
      "Exhaustive search over orderings of up to four modules. Returns "
      "(best pipeline, best reward, shared params, [(pipeline, reward), ...]).");

  py::class_<Trainer>(m, "Trainer")
      .def(py::init([](const std::string& config_text, std::size_t threads) {
             TrainConfig cfg = parse_config(config_text);
             Dataset data = load_task_data(cfg);
             return std::make_unique<Trainer>(std::move(cfg), std::move(data), threads);
           }),
           py::arg("config") = "", py::arg("threads") = 1,
           "Builds a trainer from `key = value` configuration text.")
      .def("step",
           [](Trainer& t) {
             const auto s = t.step();
             py::dict d;
             d["tau"] = s.tau;
             d["mean_reward"] = s.mean_reward;
             d["reinforce_loss"] = s.reinforce_loss;
             d["param_loss"] = s.param_loss;
             d["policy_updated"] = s.policy_updated;
             d["params_updated"] = s.params_updated;
             return d;
           })
      .def(
          "run",
          [](Trainer& t, const std::filesystem::path& out_dir) {
            std::vector<MetricsRow> result;
            {
              py::gil_scoped_release release;
              result = t.run(out_dir);
            }
            py::list rows;
            for (const auto& r : result) rows.append(row_to_dict(r));
            return rows;
          },
          py::arg("out_dir") = std::filesystem::path{})
      .def("evaluate", [](const Trainer& t) { return eval_to_dict(t.evaluate()); })
      .def("save", &Trainer::save, py::arg("path"))
      .def("load", &Trainer::load, py::arg("path"))
      .def_property_readonly("iteration", &Trainer::iteration)
      .def_property_readonly(
          "policy", [](const Trainer& t) -> const SequencePolicy& { return t.policy(); },
          py::return_value_policy::reference_internal)
      .def_property_readonly(
          "predictor", [](const Trainer& t) -> const ParamPredictor& { return t.predictor(); },
          py::return_value_policy::reference_internal);

  m.def(
      "apply_checkpoint",
      [](const std::filesystem::path& ckpt, const Array& img) {
        const Model model = load_model(ckpt);
        const Image in = to_image(img);
        const auto seq = model.policy->greedy_decode();
        return py::make_tuple(seq.to_string(),
                              to_array(run_pipeline(in, seq, model.predictor.predict(in))));
      },
      py::arg("checkpoint"), py::arg("image"),
      "Greedy pipeline of a trained checkpoint applied with predicted parameters.");
}
