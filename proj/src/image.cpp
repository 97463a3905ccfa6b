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

#include "seqisp/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "seqisp/error.hpp"

namespace seqisp {

Image::Image(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), data_(height * width * 3, fill) {}

Image::Image(std::size_t height, std::size_t width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (data_.size() != height_ * width_ * 3) {
    throw InvalidArgument("image data length " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(height) + "x" +
                          std::to_string(width) + "x3");
  }
}

bool Image::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Hsv rgb_to_hsv(const Rgb& p) {
  const double mx = std::max({p[0], p[1], p[2]});
  const double mn = std::min({p[0], p[1], p[2]});
  Hsv out;
  out.value = mx;
  if (mx == mn) return out;
  const double delta = mx - mn;
  out.saturation = delta / mx;
  const double rc = (mx - p[0]) / delta;
  const double gc = (mx - p[1]) / delta;
  const double bc = (mx - p[2]) / delta;
  double h;
  if (p[0] == mx) {
    h = bc - gc;
  } else if (p[1] == mx) {
    h = 2.0 + rc - bc;
  } else {
    h = 4.0 + gc - rc;
  }
  h /= 6.0;
  h -= std::floor(h);
  out.hue = h;
  return out;
}

Rgb hsv_to_rgb(const Hsv& p) {
  const double v = p.value;
  const double s = p.saturation;
  if (s == 0.0) return {v, v, v};
  const double h6 = p.hue * 6.0;
  const double sector = std::floor(h6);
  const double f = h6 - sector;
  const double a = v * (1.0 - s);
  const double b = v * (1.0 - s * f);
  const double c = v * (1.0 - s * (1.0 - f));
  switch (static_cast<int>(sector) % 6) {
    case 0: return {v, c, a};
    case 1: return {b, v, a};
    case 2: return {a, v, c};
    case 3: return {a, b, v};
    case 4: return {c, a, v};
    default: return {v, a, b};
  }
}

double mse(const Image& a, const Image& b) {
  if (!a.same_shape(b)) {
    throw InvalidArgument("mse: image dimensions differ (" + std::to_string(a.height()) + "x" +
                          std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
                          std::to_string(b.width()) + ")");
  }
  if (a.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

double psnr_from_mse(double m) {
  if (m <= 0.0) return kPsnrIdentical;
  return 10.0 * std::log10(1.0 / m);
}

double psnr(const Image& a, const Image& b) { return psnr_from_mse(mse(a, b)); }

double mean_intensity(const Image& img) {
  if (img.empty()) return 0.0;
  // Neumaier compensated sum
  double acc = 0.0, comp = 0.0;
  for (double v : img.data()) {
    const double t = acc + v;
    comp += std::abs(acc) >= std::abs(v) ? (acc - t) + v : (v - t) + acc;
    acc = t;
  }
  return (acc + comp) / static_cast<double>(img.size());
}

Image clamp01(const Image& img) {
  Image out = img;
  for (double& v : out.data()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

namespace {

// Reads one unsigned header token, skipping whitespace and '#' comments.
std::size_t read_header_number(std::istream& in, const std::string& what,
                               const std::filesystem::path& path) {
  int ch = in.peek();
  while (ch != EOF) {
    if (std::isspace(ch)) {
      in.get();
    } else if (ch == '#') {
      std::string discard;
      std::getline(in, discard);
    } else {
      break;
    }
    ch = in.peek();
  }
  std::string digits;
  while ((ch = in.peek()) != EOF && std::isdigit(ch)) {
    digits.push_back(static_cast<char>(in.get()));
  }
  if (digits.empty() || digits.size() > 9) {
    throw FormatError(path.string() + ": malformed PPM header (bad " + what + ")");
  }
  return std::stoul(digits);
}

}  // namespace

Image load_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");

  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '6') {
    throw FormatError(path.string() + ": not a binary PPM (expected magic P6)");
  }
  const std::size_t width = read_header_number(in, "width", path);
  const std::size_t height = read_header_number(in, "height", path);
  const std::size_t maxval = read_header_number(in, "maxval", path);
  if (width == 0 || height == 0) {
    throw FormatError(path.string() + ": PPM has zero width or height");
  }
  if (maxval != 255 && maxval != 65535) {
    throw FormatError(path.string() + ": unsupported PPM maxval " + std::to_string(maxval) +
                      " (expected 255 or 65535)");
  }
  const int sep = in.get();
  if (sep == EOF || !std::isspace(sep)) {
    throw FormatError(path.string() + ": malformed PPM header (missing separator)");
  }

  const std::size_t samples = width * height * 3;
  const std::size_t bytes_per_sample = maxval == 255 ? 1 : 2;
  std::string payload(samples * bytes_per_sample, '\0');
  in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (static_cast<std::size_t>(in.gcount()) != payload.size()) {
    throw FormatError(path.string() + ": truncated PPM payload (expected " +
                      std::to_string(payload.size()) + " bytes, got " +
                      std::to_string(in.gcount()) + ")");
  }

  std::vector<double> data(samples);
  const auto* bytes = reinterpret_cast<const unsigned char*>(payload.data());
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < samples; ++i) {
    const unsigned value = bytes_per_sample == 1
                               ? bytes[i]
                               : (static_cast<unsigned>(bytes[2 * i]) << 8) | bytes[2 * i + 1];
    data[i] = value * scale;
  }
  return Image(height, width, std::move(data));
}

void save_ppm(const Image& img, const std::filesystem::path& path) {
  if (img.empty()) throw InvalidArgument("save_ppm: empty image");
  std::string payload(img.size() * 2, '\0');
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double v = img[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument("save_ppm: sample " + std::to_string(i) + " = " + std::to_string(v) +
                            " outside [0, 1]");
    }
    const auto q = static_cast<unsigned>(std::lround(v * 65535.0));
    payload[2 * i] = static_cast<char>((q >> 8) & 0xff);
    payload[2 * i + 1] = static_cast<char>(q & 0xff);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "P6\n" << img.width() << ' ' << img.height() << "\n65535\n";
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace seqisp
