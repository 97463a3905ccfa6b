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

#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqisp/rng.hpp"

namespace seqisp {

/// Dense row-major array of doubles with an explicit shape.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims, double fill = 0.0)
      : shape(std::move(dims)), data(count(shape), fill) {}

  static std::size_t count(const std::vector<std::size_t>& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                           std::multiplies<>());
  }

  std::size_t size() const { return data.size(); }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  /// Element (r, c) of a rank-2 tensor.
  double& at(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * shape[1] + c]; }

  std::span<double> row(std::size_t r) {
    return {data.data() + r * shape[1], shape[1]};
  }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * shape[1], shape[1]};
  }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }
  void fill_uniform(Rng& rng, double bound) {
    for (auto& x : data) x = rng.uniform(-bound, bound);
  }

  bool all_finite() const;
  bool operator==(const Tensor&) const = default;
};

/// Ordered collection of named tensors. Networks keep their weights in one,
/// and the same layout doubles as the gradient container.
class ParamSet {
 public:
  /// Appends a zero tensor and returns its index.
  std::size_t add(std::string name, std::vector<std::size_t> shape);

  std::size_t size() const { return tensors_.size(); }
  Tensor& operator[](std::size_t i) { return tensors_[i]; }
  const Tensor& operator[](std::size_t i) const { return tensors_[i]; }
  const std::string& name(std::size_t i) const { return names_[i]; }
  /// Index of `name`, or size() when absent.
  std::size_t find(std::string_view name) const;

  /// Same names and shapes, all values zero.
  ParamSet zeros_like() const;
  bool same_layout(const ParamSet& other) const;
  void set_zero();
  /// this += alpha * other
  void add_scaled(const ParamSet& other, double alpha);
  bool all_finite() const;

  /// Total number of scalars, and flat access across all tensors in order.
  std::size_t num_values() const;
  double& flat(std::size_t k);
  double flat(std::size_t k) const;

  bool operator==(const ParamSet&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> tensors_;
};

// y = W x  (W: rows x cols)
void matvec(const Tensor& w, std::span<const double> x, std::span<double> y);
// y += W x
void matvec_add(const Tensor& w, std::span<const double> x, std::span<double> y);
// x_grad += W^T g
void matvec_t_add(const Tensor& w, std::span<const double> g, std::span<double> x_grad);
// W_grad += g x^T
void outer_add(Tensor& w_grad, std::span<const double> g, std::span<const double> x);

}  // namespace seqisp
