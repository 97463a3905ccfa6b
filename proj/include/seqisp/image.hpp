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

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace seqisp {

using Rgb = std::array<double, 3>;

/// Linear-RGB image stored row-major, channels interleaved (H x W x 3).
/// Nominal range is [0, 1]; pipeline intermediates may leave it.
class Image {
 public:
  Image() = default;
  Image(std::size_t height, std::size_t width, double fill = 0.0);
  Image(std::size_t height, std::size_t width, std::vector<double> data);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t pixels() const { return height_ * width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& storage() { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& at(std::size_t y, std::size_t x, std::size_t c) {
    return data_[(y * width_ + x) * 3 + c];
  }
  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return data_[(y * width_ + x) * 3 + c];
  }

  Rgb pixel(std::size_t i) const { return {data_[3 * i], data_[3 * i + 1], data_[3 * i + 2]}; }
  void set_pixel(std::size_t i, const Rgb& p) {
    data_[3 * i] = p[0];
    data_[3 * i + 1] = p[1];
    data_[3 * i + 2] = p[2];
  }

  bool same_shape(const Image& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }
  bool all_finite() const;

  bool operator==(const Image&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

struct Hsv {
  double hue = 0.0;  // fraction of a full turn, [0, 1)
  double saturation = 0.0;
  double value = 0.0;
};

inline constexpr Rgb kLuminanceWeights{0.27, 0.67, 0.06};

/// Weighted luminance 0.27 R + 0.67 G + 0.06 B.
inline double luminance(const Rgb& p) {
  return kLuminanceWeights[0] * p[0] + kLuminanceWeights[1] * p[1] +
         kLuminanceWeights[2] * p[2];
}

/// Hexcone HSV. Achromatic pixels get hue 0 and saturation 0.
Hsv rgb_to_hsv(const Rgb& p);
Rgb hsv_to_rgb(const Hsv& p);

/// Sentinel returned by psnr() for identical images.
inline constexpr double kPsnrIdentical = 1e9;

double mse(const Image& a, const Image& b);
/// PSNR in dB for peak 1.0.
double psnr(const Image& a, const Image& b);
double psnr_from_mse(double mse);
double mean_intensity(const Image& img);
Image clamp01(const Image& img);

/// Binary PPM (P6). Loads maxval 255 or 65535; always saves 16-bit.
Image load_ppm(const std::filesystem::path& path);
void save_ppm(const Image& img, const std::filesystem::path& path);

}  // namespace seqisp
