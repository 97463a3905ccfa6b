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

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqisp/tensor.hpp"

namespace seqisp {

inline constexpr std::string_view kCheckpointMagic = "SEQISP01";

/// Ordered list of named tensors in the on-disk container:
/// magic, then per tensor: u32 name length, name bytes, u32 rank,
/// u32 dims, f64 values. All integers and floats little-endian.
class TensorArchive {
 public:
  void put(std::string name, Tensor tensor);
  void put_scalar(std::string name, double value);
  /// Prefixes every tensor name of `set` with `prefix`.
  void put_set(std::string_view prefix, const ParamSet& set);

  bool contains(std::string_view name) const;
  const Tensor& get(std::string_view name) const;  // throws FormatError if absent
  double get_scalar(std::string_view name) const;
  /// Fills a set with the same layout from prefixed records; throws
  /// FormatError on missing tensors or shape mismatches.
  void get_set(std::string_view prefix, ParamSet& set) const;

  const std::vector<std::pair<std::string, Tensor>>& records() const { return records_; }

  void save(const std::filesystem::path& path) const;
  static TensorArchive load(const std::filesystem::path& path);

 private:
  std::vector<std::pair<std::string, Tensor>> records_;
};

}  // namespace seqisp
