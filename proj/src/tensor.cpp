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

#include "seqisp/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace seqisp {

bool Tensor::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::size_t ParamSet::add(std::string name, std::vector<std::size_t> shape) {
  names_.push_back(std::move(name));
  tensors_.emplace_back(std::move(shape));
  return tensors_.size() - 1;
}

std::size_t ParamSet::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return names_.size();
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out = *this;
  out.set_zero();
  return out;
}

bool ParamSet::same_layout(const ParamSet& other) const {
  if (names_ != other.names_) return false;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    if (tensors_[i].shape != other.tensors_[i].shape) return false;
  }
  return true;
}

void ParamSet::set_zero() {
  for (auto& t : tensors_) t.fill(0.0);
}

void ParamSet::add_scaled(const ParamSet& other, double alpha) {
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    auto& dst = tensors_[i].data;
    const auto& src = other.tensors_[i].data;
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += alpha * src[k];
  }
}

bool ParamSet::all_finite() const {
  for (const auto& t : tensors_) {
    if (!t.all_finite()) return false;
  }
  return true;
}

std::size_t ParamSet::num_values() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.size();
  return n;
}

double& ParamSet::flat(std::size_t k) {
  for (auto& t : tensors_) {
    if (k < t.size()) return t.data[k];
    k -= t.size();
  }
  throw std::out_of_range("ParamSet::flat index out of range");
}

double ParamSet::flat(std::size_t k) const { return const_cast<ParamSet*>(this)->flat(k); }

void matvec(const Tensor& w, std::span<const double> x, std::span<double> y) {
  const std::size_t rows = w.shape[0], cols = w.shape[1];
  for (std::size_t r = 0; r < rows; ++r) {
    const double* wr = w.data.data() + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
    y[r] = acc;
  }
}

void matvec_add(const Tensor& w, std::span<const double> x, std::span<double> y) {
  const std::size_t rows = w.shape[0], cols = w.shape[1];
  for (std::size_t r = 0; r < rows; ++r) {
    const double* wr = w.data.data() + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
    y[r] += acc;
  }
}

void matvec_t_add(const Tensor& w, std::span<const double> g, std::span<double> x_grad) {
  const std::size_t rows = w.shape[0], cols = w.shape[1];
  for (std::size_t r = 0; r < rows; ++r) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    const double* wr = w.data.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) x_grad[c] += wr[c] * gr;
  }
}

void outer_add(Tensor& w_grad, std::span<const double> g, std::span<const double> x) {
  const std::size_t rows = w_grad.shape[0], cols = w_grad.shape[1];
  for (std::size_t r = 0; r < rows; ++r) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    double* wr = w_grad.data.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) wr[c] += gr * x[c];
  }
}

}  // namespace seqisp
