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

#include "seqisp/config.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "seqisp/error.hpp"

namespace seqisp {

namespace {

std::string_view trim(std::string_view s) {
  const auto issp = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && issp(s.front())) s.remove_prefix(1);
  while (!s.empty() && issp(s.back())) s.remove_suffix(1);
  return s;
}

std::uint64_t to_u64(std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw InvalidArgument("expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

double to_double(std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  errno = 0;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw InvalidArgument("expected a number, got '" + s + "'");
  }
  return out;
}

bool to_bool(std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InvalidArgument("expected true or false, got '" + std::string(v) + "'");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Field {
  std::function<void(TrainConfig&, std::string_view)> set;
  std::function<std::string(const TrainConfig&)> get;
};

template <typename T>
Field size_field(T TrainConfig::*member) {
  return {[member](TrainConfig& c, std::string_view v) { c.*member = static_cast<T>(to_u64(v)); },
          [member](const TrainConfig& c) { return std::to_string(c.*member); }};
}

Field real_field(double TrainConfig::*member) {
  return {[member](TrainConfig& c, std::string_view v) { c.*member = to_double(v); },
          [member](const TrainConfig& c) { return fmt(c.*member); }};
}

Field string_field(std::string TrainConfig::*member) {
  return {[member](TrainConfig& c, std::string_view v) { c.*member = std::string(v); },
          [member](const TrainConfig& c) { return c.*member; }};
}

template <typename S, typename T>
Field nested_real(S TrainConfig::*outer, T S::*inner) {
  return {[=](TrainConfig& c, std::string_view v) { (c.*outer).*inner = to_double(v); },
          [=](const TrainConfig& c) { return fmt((c.*outer).*inner); }};
}

template <typename S>
Field nested_size(S TrainConfig::*outer, std::size_t S::*inner) {
  return {[=](TrainConfig& c, std::string_view v) {
            (c.*outer).*inner = static_cast<std::size_t>(to_u64(v));
          },
          [=](const TrainConfig& c) { return std::to_string((c.*outer).*inner); }};
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = [] {
    std::map<std::string, Field, std::less<>> f;
    f["task"] = string_field(&TrainConfig::task);
    f["data_dir"] = string_field(&TrainConfig::data_dir);
    f["data_seed"] = size_field(&TrainConfig::data_seed);
    f["n_train"] = size_field(&TrainConfig::n_train);
    f["n_eval"] = size_field(&TrainConfig::n_eval);
    f["image_size"] = size_field(&TrainConfig::image_size);
    f["policy"] = string_field(&TrainConfig::policy);
    f["pool"] = {[](TrainConfig& c, std::string_view v) { c.pool = parse_pool(v); },
                 [](const TrainConfig& c) { return pool_to_string(c.pool); }};
    f["gru_hidden"] = nested_size(&TrainConfig::gru, &GruPolicyConfig::hidden);
    f["gru_token_embed"] = nested_size(&TrainConfig::gru, &GruPolicyConfig::token_embed);
    f["gru_step_embed"] = nested_size(&TrainConfig::gru, &GruPolicyConfig::step_embed);
    f["gru_film_hidden"] = nested_size(&TrainConfig::gru, &GruPolicyConfig::film_hidden);
    f["gru_init_scale"] = nested_real(&TrainConfig::gru, &GruPolicyConfig::init_scale);
    f["predictor_channels"] = nested_size(&TrainConfig::predictor, &PredictorConfig::channels);
    f["predictor_latent"] = nested_size(&TrainConfig::predictor, &PredictorConfig::latent);
    f["predictor_hidden"] = nested_size(&TrainConfig::predictor, &PredictorConfig::head_hidden);
    f["predictor_input_size"] =
        nested_size(&TrainConfig::predictor, &PredictorConfig::input_size);
    f["seed"] = size_field(&TrainConfig::seed);
    f["batch_size"] = size_field(&TrainConfig::batch_size);
    f["iterations"] = size_field(&TrainConfig::iterations);
    f["lr_param"] = real_field(&TrainConfig::lr_param);
    f["lr_seq"] = real_field(&TrainConfig::lr_seq);
    f["adam_beta1"] = real_field(&TrainConfig::beta1);
    f["adam_beta2"] = real_field(&TrainConfig::beta2);
    f["adam_eps"] = real_field(&TrainConfig::adam_eps);
    f["tau_max"] = nested_real(&TrainConfig::temperature, &TemperatureSchedule::tau_max);
    f["tau_min"] = nested_real(&TrainConfig::temperature, &TemperatureSchedule::tau_min);
    f["tau_half_life"] = nested_real(&TrainConfig::temperature, &TemperatureSchedule::half_life);
    f["alpha_low"] = nested_real(&TrainConfig::penalty, &PenaltyConfig::alpha_low);
    f["alpha_high"] = nested_real(&TrainConfig::penalty, &PenaltyConfig::alpha_high);
    f["intensity_low"] = nested_real(&TrainConfig::penalty, &PenaltyConfig::intensity_low);
    f["intensity_high"] = nested_real(&TrainConfig::penalty, &PenaltyConfig::intensity_high);
    f["length_penalty"] = nested_real(&TrainConfig::penalty, &PenaltyConfig::length_penalty);
    f["schedule"] = {[](TrainConfig& c, std::string_view v) {
                       if (v == "alternate") c.schedule = UpdateSchedule::kAlternate;
                       else if (v == "joint") c.schedule = UpdateSchedule::kJoint;
                       else throw InvalidArgument("schedule must be alternate or joint");
                     },
                     [](const TrainConfig& c) {
                       return std::string(c.schedule == UpdateSchedule::kJoint ? "joint"
                                                                               : "alternate");
                     }};
    f["baseline"] = {[](TrainConfig& c, std::string_view v) { c.baseline = to_bool(v); },
                     [](const TrainConfig& c) { return std::string(c.baseline ? "true" : "false"); }};
    f["eval_interval"] = size_field(&TrainConfig::eval_interval);
    f["oracle_grid"] = size_field(&TrainConfig::oracle_grid);
    f["oracle_rounds"] = size_field(&TrainConfig::oracle_rounds);
    return f;
  }();
  return table;
}

}  // namespace

void TrainConfig::validate() const {
  make_task(task);
  if (policy != "gru" && policy != "table") {
    throw InvalidArgument("policy must be gru or table");
  }
  if (pool.none()) throw InvalidArgument("module pool is empty");
  if (batch_size == 0) throw InvalidArgument("batch_size must be at least 1");
  if (!(lr_param > 0.0) || !(lr_seq > 0.0)) throw InvalidArgument("learning rates must be positive");
  if (!(temperature.tau_min > 0.0) || !(temperature.tau_max > 0.0) ||
      !(temperature.half_life > 0.0)) {
    throw InvalidArgument("temperature schedule values must be positive");
  }
  if (eval_interval == 0) throw InvalidArgument("eval_interval must be at least 1");
  if (image_size < 8) throw InvalidArgument("image_size must be at least 8");
  if (task == "synth_restore" && (n_train == 0 || n_eval == 0)) {
    throw InvalidArgument("n_train and n_eval must be positive");
  }
  if (task == "enhance_mse" && data_dir.empty()) {
    throw InvalidArgument("enhance_mse needs data_dir");
  }
  penalty.validate();
}

TrainConfig parse_config(std::string_view text) {
  TrainConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto where = "config line " + std::to_string(line_no) + ": ";
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidArgument(where + "expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = fields().find(key);
    if (it == fields().end()) throw InvalidArgument(where + "unknown key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second) {
      throw InvalidArgument(where + "duplicate key '" + std::string(key) + "'");
    }
    try {
      it->second.set(cfg, value);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(where + std::string(key) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const TrainConfig& cfg) {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + " = " + field.get(cfg) + "\n";
  return out;
}

}  // namespace seqisp
