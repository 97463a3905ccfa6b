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

#include <doctest.h>

#include <cmath>

#include "seqisp/predictor.hpp"
#include "test_support.hpp"

using namespace seqisp;
using seqisp::testing::central_diff;
using seqisp::testing::random_image;
using seqisp::testing::rel_error;

namespace {

PredictorConfig tiny_config() {
  PredictorConfig c;
  c.channels = 2;
  c.latent = 4;
  c.head_hidden = 8;
  c.input_size = 16;
  return c;
}

double weighted_output(const ParamPredictor& p, const Image& img, std::span<const double> up) {
  const auto out = p.forward(img).output;
  double acc = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) acc += up[i] * out[i];
  return acc;
}

}  // namespace

TEST_SUITE("predictor") {

TEST_CASE("zero weights predict the midpoint") {
  const auto p = ParamPredictor::zeros();
  const ParamVector v = p.predict(random_image(1, 20, 30));
  for (double x : v.values()) CHECK(x == 0.5);
}

TEST_CASE("default architecture") {
  ParamPredictor p(3);
  CHECK(p.weights()[ParamPredictor::kConv3W].shape ==
        std::vector<std::size_t>{64, 32, 3, 3});
  CHECK(p.weights()[ParamPredictor::kHead1W].shape == std::vector<std::size_t>{256, 128});
  CHECK(p.weights()[ParamPredictor::kDecoderW].shape == std::vector<std::size_t>{27, 64});
  for (double b : p.weights()[ParamPredictor::kDecoderB].data) CHECK(b == 0.0);
  const double bound = 1.0 / std::sqrt(27.0);
  for (double w : p.weights()[ParamPredictor::kConv1W].data) CHECK(std::abs(w) <= bound);
  CHECK(p.weights().num_values() < 200000);

  const auto cache = p.forward(random_image(4, 64, 64));
  CHECK(cache.act3.size() == 64 * 8 * 8);
  CHECK(cache.features.size() == 128);
  CHECK(cache.output.size() == kTotalParams);
  for (double v : cache.output) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("adaptive pooling") {
  const Image img = random_image(5, 64, 64);
  const auto pooled = adaptive_average_pool(img, 64);
  for (std::size_t y = 0; y < 64; ++y) {
    for (std::size_t x = 0; x < 64; ++x) {
      for (std::size_t c = 0; c < 3; ++c) CHECK(pooled[(c * 64 + y) * 64 + x] == img.at(y, x, c));
    }
  }

  // Overlapping cells when the size does not divide evenly.
  Image odd(3, 3);
  for (std::size_t i = 0; i < odd.size(); ++i) odd[i] = static_cast<double>(i / 3);
  const auto p2 = adaptive_average_pool(odd, 2);
  CHECK(p2[0] == doctest::Approx((0 + 1 + 3 + 4) / 4.0));
  CHECK(p2[3] == doctest::Approx((4 + 5 + 7 + 8) / 4.0));
}

TEST_CASE("prediction is invariant to nearest-neighbor upscaling") {
  ParamPredictor p(6);
  const Image img = random_image(7, 64, 64);
  Image big(128, 128);
  for (std::size_t y = 0; y < 128; ++y) {
    for (std::size_t x = 0; x < 128; ++x) {
      for (std::size_t c = 0; c < 3; ++c) big.at(y, x, c) = img.at(y / 2, x / 2, c);
    }
  }
  const auto a = p.predict(img), b = p.predict(big);
  for (std::size_t i = 0; i < kTotalParams; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  CHECK(p.predict(img) == a);
}

TEST_CASE("backward matches central differences") {
  ParamPredictor p(8, tiny_config());
  Image img = random_image(9, 16, 16);
  std::vector<double> up(kTotalParams);
  Rng rng(10);
  for (auto& u : up) u = rng.uniform(-1.0, 1.0);

  ParamSet grad = p.weights().zeros_like();
  Image d_img;
  p.backward(img, p.forward(img), up, grad, &d_img);
  auto loss = [&] { return weighted_output(p, img, up); };
  double worst = 0.0;
  for (std::size_t k = 0; k < p.weights().num_values(); ++k) {
    const double fd = central_diff(loss, p.weights().flat(k), 1e-5);
    worst = std::max(worst, rel_error(grad.flat(k), fd));
  }
  CHECK(worst <= 1e-4);

  double worst_img = 0.0;
  for (std::size_t i = 0; i < img.size(); i += 7) {
    const double fd = central_diff(loss, img[i], 1e-5);
    worst_img = std::max(worst_img, rel_error(d_img[i], fd));
  }
  CHECK(worst_img <= 1e-4);
}

TEST_CASE("backward through a downsampling pool") {
  PredictorConfig c = tiny_config();
  c.input_size = 8;
  ParamPredictor p(11, c);
  Image img = random_image(12, 13, 11);
  std::vector<double> up(kTotalParams, 0.0);
  up[3] = 1.0;
  up[20] = -0.5;
  ParamSet grad = p.weights().zeros_like();
  Image d_img;
  p.backward(img, p.forward(img), up, grad, &d_img);
  auto loss = [&] { return weighted_output(p, img, up); };
  for (std::size_t i = 0; i < img.size(); i += 5) {
    CHECK(rel_error(d_img[i], central_diff(loss, img[i], 1e-5), 1e-7) <= 1e-4);
  }
}

TEST_CASE("zero upstream gives zero gradients") {
  ParamPredictor p(13, tiny_config());
  const Image img = random_image(14, 16, 16);
  ParamSet grad = p.weights().zeros_like();
  p.backward(img, p.forward(img), std::vector<double>(kTotalParams, 0.0), grad);
  for (std::size_t k = 0; k < grad.num_values(); ++k) CHECK(grad.flat(k) == 0.0);
}

TEST_CASE("max pooling routes to the first maximum") {
  PredictorConfig c = tiny_config();
  ParamPredictor p(15, c);
  const Image img = random_image(16, 16, 16);
  const auto cache = p.forward(img);
  const std::size_t cells = 4;  // 2x2 after three stride-2 stages on 16x16
  for (std::size_t ch = 0; ch < 4 * c.channels; ++ch) {
    const double* m = cache.act3.data() + ch * cells;
    const std::size_t idx = cache.max_index[ch];
    for (std::size_t i = 0; i < cells; ++i) {
      CHECK(m[i] <= m[idx]);
      if (i < idx) CHECK(m[i] < m[idx]);
    }
  }
}

TEST_CASE("weights round trip through from_weights") {
  ParamPredictor p(17, tiny_config());
  const auto q = ParamPredictor::from_weights(p.weights(), 16);
  CHECK(q.config().channels == 2);
  CHECK(q.config().latent == 4);
  const Image img = random_image(18, 16, 16);
  CHECK(q.predict(img) == p.predict(img));
}

}
