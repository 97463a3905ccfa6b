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

#include "seqisp/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "seqisp/error.hpp"

namespace seqisp {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

class Reader {
 public:
  Reader(std::vector<char> bytes, std::string path) : bytes_(std::move(bytes)), path_(std::move(path)) {}

  bool at_end() const { return pos_ == bytes_.size(); }

  void read(void* dst, std::size_t n, std::string_view what) {
    if (bytes_.size() - pos_ < n) {
      throw FormatError("checkpoint " + path_ + " is truncated while reading " + std::string(what));
    }
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }

  std::uint32_t u32(std::string_view what) {
    std::uint32_t v = 0;
    read(&v, sizeof v, what);
    return v;
  }

 private:
  std::vector<char> bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void TensorArchive::put(std::string name, Tensor tensor) {
  for (auto& [n, t] : records_) {
    if (n == name) {
      t = std::move(tensor);
      return;
    }
  }
  records_.emplace_back(std::move(name), std::move(tensor));
}

void TensorArchive::put_scalar(std::string name, double value) {
  put(std::move(name), Tensor({1}, value));
}

void TensorArchive::put_set(std::string_view prefix, const ParamSet& set) {
  for (std::size_t i = 0; i < set.size(); ++i) put(std::string(prefix) + set.name(i), set[i]);
}

bool TensorArchive::contains(std::string_view name) const {
  for (const auto& [n, t] : records_) {
    if (n == name) return true;
  }
  return false;
}

const Tensor& TensorArchive::get(std::string_view name) const {
  for (const auto& [n, t] : records_) {
    if (n == name) return t;
  }
  throw FormatError("checkpoint is missing tensor '" + std::string(name) + "'");
}

double TensorArchive::get_scalar(std::string_view name) const {
  const Tensor& t = get(name);
  if (t.size() != 1) throw FormatError("checkpoint tensor '" + std::string(name) + "' is not a scalar");
  return t[0];
}

void TensorArchive::get_set(std::string_view prefix, ParamSet& set) const {
  for (std::size_t i = 0; i < set.size(); ++i) {
    const std::string name = std::string(prefix) + set.name(i);
    const Tensor& t = get(name);
    if (t.shape != set[i].shape) {
      throw FormatError("checkpoint tensor '" + name + "' has an unexpected shape");
    }
    set[i] = t;
  }
}

void TensorArchive::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(kCheckpointMagic.data(), static_cast<std::streamsize>(kCheckpointMagic.size()));
  for (const auto& [name, t] : records_) {
    write_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(out, static_cast<std::uint32_t>(t.shape.size()));
    for (std::size_t d : t.shape) write_u32(out, static_cast<std::uint32_t>(d));
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  }
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

TensorArchive TensorArchive::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(std::move(bytes), path.string());

  char magic[8];
  try {
    r.read(magic, sizeof magic, "magic");
  } catch (const FormatError&) {
    throw FormatError("checkpoint " + path.string() + ": magic mismatch (file too short)");
  }
  if (std::string_view(magic, sizeof magic) != kCheckpointMagic) {
    throw FormatError("checkpoint " + path.string() + ": magic mismatch, expected SEQISP01");
  }

  TensorArchive archive;
  while (!r.at_end()) {
    const std::uint32_t name_len = r.u32("tensor name length");
    if (name_len > 4096) throw FormatError("checkpoint tensor name length is implausible");
    std::string name(name_len, '\0');
    r.read(name.data(), name_len, "tensor name");
    const std::uint32_t rank = r.u32("rank of '" + name + "'");
    if (rank > 8) throw FormatError("checkpoint tensor '" + name + "' has implausible rank");
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = r.u32("dims of '" + name + "'");
    Tensor t(shape);
    r.read(t.data.data(), t.data.size() * sizeof(double), "values of '" + name + "'");
    archive.records_.emplace_back(std::move(name), std::move(t));
  }
  return archive;
}

}  // namespace seqisp
