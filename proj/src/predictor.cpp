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

#include "seqisp/predictor.hpp"

#include <algorithm>
#include <cmath>

#include "seqisp/error.hpp"

namespace seqisp {

namespace {

struct ConvShape {
  std::size_t in_ch, out_ch, in_size, out_size;
};

// 3x3 convolution, stride 2, zero padding 1. Input/output are CHW.
void conv_forward(const ConvShape& s, const Tensor& w, const Tensor& b,
                  const std::vector<double>& in, std::vector<double>& out) {
  const long n_in = static_cast<long>(s.in_size);
  const std::size_t n_out = s.out_size;
  out.assign(s.out_ch * n_out * n_out, 0.0);
  for (std::size_t oc = 0; oc < s.out_ch; ++oc) {
    double* o = out.data() + oc * n_out * n_out;
    std::fill(o, o + n_out * n_out, b[oc]);
    for (std::size_t ic = 0; ic < s.in_ch; ++ic) {
      const double* src = in.data() + ic * s.in_size * s.in_size;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const double wv = w[((oc * s.in_ch + ic) * 3 + ky) * 3 + kx];
          for (std::size_t oy = 0; oy < n_out; ++oy) {
            const long iy = 2 * static_cast<long>(oy) + ky - 1;
            if (iy < 0 || iy >= n_in) continue;
            const double* srow = src + iy * n_in;
            double* orow = o + oy * n_out;
            for (std::size_t ox = 0; ox < n_out; ++ox) {
              const long ix = 2 * static_cast<long>(ox) + kx - 1;
              if (ix < 0 || ix >= n_in) continue;
              orow[ox] += wv * srow[ix];
            }
          }
        }
      }
    }
  }
}

// Accumulates weight/bias gradients and, when g_in is non-null, input gradients.
void conv_backward(const ConvShape& s, const Tensor& w, const std::vector<double>& in,
                   const std::vector<double>& g_out, Tensor& g_w, Tensor& g_b,
                   std::vector<double>* g_in) {
  const long n_in = static_cast<long>(s.in_size);
  const std::size_t n_out = s.out_size;
  if (g_in) g_in->assign(s.in_ch * s.in_size * s.in_size, 0.0);
  for (std::size_t oc = 0; oc < s.out_ch; ++oc) {
    const double* go = g_out.data() + oc * n_out * n_out;
    double bsum = 0.0;
    for (std::size_t k = 0; k < n_out * n_out; ++k) bsum += go[k];
    g_b[oc] += bsum;
    for (std::size_t ic = 0; ic < s.in_ch; ++ic) {
      const double* src = in.data() + ic * s.in_size * s.in_size;
      double* gsrc = g_in ? g_in->data() + ic * s.in_size * s.in_size : nullptr;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const std::size_t wi = ((oc * s.in_ch + ic) * 3 + ky) * 3 + kx;
          const double wv = w[wi];
          double acc = 0.0;
          for (std::size_t oy = 0; oy < n_out; ++oy) {
            const long iy = 2 * static_cast<long>(oy) + ky - 1;
            if (iy < 0 || iy >= n_in) continue;
            const double* grow = go + oy * n_out;
            for (std::size_t ox = 0; ox < n_out; ++ox) {
              const long ix = 2 * static_cast<long>(ox) + kx - 1;
              if (ix < 0 || ix >= n_in) continue;
              acc += grow[ox] * src[iy * n_in + ix];
              if (gsrc) gsrc[iy * n_in + ix] += wv * grow[ox];
            }
          }
          g_w[wi] += acc;
        }
      }
    }
  }
}

void leaky(const std::vector<double>& pre, std::vector<double>& act, double slope) {
  act.resize(pre.size());
  for (std::size_t i = 0; i < pre.size(); ++i) act[i] = pre[i] > 0.0 ? pre[i] : slope * pre[i];
}

void leaky_backward(const std::vector<double>& pre, std::vector<double>& g, double slope) {
  for (std::size_t i = 0; i < pre.size(); ++i) {
    if (pre[i] <= 0.0) g[i] *= slope;
  }
}

struct PoolRange {
  std::size_t begin, end;
};

PoolRange pool_range(std::size_t i, std::size_t in, std::size_t out) {
  const std::size_t begin = i * in / out;
  const std::size_t end = ((i + 1) * in + out - 1) / out;
  return {begin, end};
}

}  // namespace

std::vector<double> adaptive_average_pool(const Image& img, std::size_t size) {
  if (img.empty()) throw InvalidArgument("adaptive_average_pool: empty image");
  std::vector<double> out(3 * size * size, 0.0);
  for (std::size_t oy = 0; oy < size; ++oy) {
    const PoolRange ry = pool_range(oy, img.height(), size);
    for (std::size_t ox = 0; ox < size; ++ox) {
      const PoolRange rx = pool_range(ox, img.width(), size);
      const double inv =
          1.0 / static_cast<double>((ry.end - ry.begin) * (rx.end - rx.begin));
      for (std::size_t c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (std::size_t y = ry.begin; y < ry.end; ++y) {
          for (std::size_t x = rx.begin; x < rx.end; ++x) acc += img.at(y, x, c);
        }
        out[(c * size + oy) * size + ox] = acc * inv;
      }
    }
  }
  return out;
}

ParamPredictor::ParamPredictor(const PredictorConfig& config) : config_(config) {
  if (config_.input_size % 8 != 0 || config_.input_size == 0) {
    throw InvalidArgument("predictor input size must be a positive multiple of 8");
  }
  allocate();
}

ParamPredictor::ParamPredictor(std::uint64_t seed, const PredictorConfig& config)
    : ParamPredictor(config) {
  Rng rng(seed);
  auto init_pair = [&](std::size_t w, std::size_t b, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    weights_[w].fill_uniform(rng, bound);
    weights_[b].fill_uniform(rng, bound);
  };
  const std::size_t c = config_.channels;
  init_pair(kConv1W, kConv1B, 3 * 9);
  init_pair(kConv2W, kConv2B, c * 9);
  init_pair(kConv3W, kConv3B, 2 * c * 9);
  init_pair(kHead1W, kHead1B, 8 * c);
  init_pair(kHead2W, kHead2B, config_.head_hidden);
  init_pair(kDecoderW, kDecoderB, config_.latent);
  weights_[kDecoderB].fill(0.0);
}

ParamPredictor ParamPredictor::zeros(const PredictorConfig& config) {
  return ParamPredictor(config);
}

ParamPredictor ParamPredictor::from_weights(ParamSet weights, std::size_t input_size) {
  PredictorConfig config;
  config.input_size = input_size;
  const std::size_t c1 = weights.find("predictor.conv1.w");
  const std::size_t h2 = weights.find("predictor.head2.w");
  if (c1 == weights.size() || h2 == weights.size()) {
    throw FormatError("predictor weights missing conv1/head2 tensors");
  }
  config.channels = weights[c1].shape.at(0);
  config.latent = weights[h2].shape.at(0);
  config.head_hidden = weights[h2].shape.at(1);
  ParamPredictor p(config);
  if (!p.weights_.same_layout(weights)) {
    throw FormatError("predictor weights have an unexpected layout");
  }
  p.weights_ = std::move(weights);
  return p;
}

void ParamPredictor::allocate() {
  const std::size_t c = config_.channels;
  weights_ = ParamSet();
  weights_.add("predictor.conv1.w", {c, 3, 3, 3});
  weights_.add("predictor.conv1.b", {c});
  weights_.add("predictor.conv2.w", {2 * c, c, 3, 3});
  weights_.add("predictor.conv2.b", {2 * c});
  weights_.add("predictor.conv3.w", {4 * c, 2 * c, 3, 3});
  weights_.add("predictor.conv3.b", {4 * c});
  weights_.add("predictor.head1.w", {config_.head_hidden, 8 * c});
  weights_.add("predictor.head1.b", {config_.head_hidden});
  weights_.add("predictor.head2.w", {config_.latent, config_.head_hidden});
  weights_.add("predictor.head2.b", {config_.latent});
  weights_.add("predictor.decoder.w", {kTotalParams, config_.latent});
  weights_.add("predictor.decoder.b", {kTotalParams});
}

std::size_t ParamPredictor::map_size(int stage) const {
  return config_.input_size >> stage;
}

ParamPredictor::Cache ParamPredictor::forward(const Image& img) const {
  const std::size_t c = config_.channels;
  const double slope = config_.leaky_slope;
  Cache k;
  k.pooled = adaptive_average_pool(img, config_.input_size);

  conv_forward({3, c, map_size(0), map_size(1)}, weights_[kConv1W], weights_[kConv1B], k.pooled,
               k.pre1);
  leaky(k.pre1, k.act1, slope);
  conv_forward({c, 2 * c, map_size(1), map_size(2)}, weights_[kConv2W], weights_[kConv2B],
               k.act1, k.pre2);
  leaky(k.pre2, k.act2, slope);
  conv_forward({2 * c, 4 * c, map_size(2), map_size(3)}, weights_[kConv3W], weights_[kConv3B],
               k.act2, k.pre3);
  leaky(k.pre3, k.act3, slope);

  const std::size_t cells = map_size(3) * map_size(3);
  k.features.assign(8 * c, 0.0);
  k.max_index.assign(4 * c, 0);
  for (std::size_t ch = 0; ch < 4 * c; ++ch) {
    const double* m = k.act3.data() + ch * cells;
    double sum = 0.0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < cells; ++i) {
      sum += m[i];
      if (m[i] > m[best]) best = i;
    }
    k.features[ch] = sum / static_cast<double>(cells);
    k.features[4 * c + ch] = m[best];
    k.max_index[ch] = best;
  }

  k.head_pre.assign(weights_[kHead1B].data.begin(), weights_[kHead1B].data.end());
  matvec_add(weights_[kHead1W], k.features, k.head_pre);
  k.head_act.resize(k.head_pre.size());
  for (std::size_t i = 0; i < k.head_pre.size(); ++i) k.head_act[i] = std::max(0.0, k.head_pre[i]);
  k.latent.assign(weights_[kHead2B].data.begin(), weights_[kHead2B].data.end());
  matvec_add(weights_[kHead2W], k.head_act, k.latent);
  k.decoded.assign(weights_[kDecoderB].data.begin(), weights_[kDecoderB].data.end());
  matvec_add(weights_[kDecoderW], k.latent, k.decoded);
  k.output.resize(kTotalParams);
  for (std::size_t i = 0; i < kTotalParams; ++i) {
    k.output[i] = std::clamp(0.5 * (std::tanh(k.decoded[i]) + 1.0), 0.0, 1.0);
  }
  return k;
}

ParamVector ParamPredictor::predict(const Image& img) const {
  return ParamVector(forward(img).output);
}

void ParamPredictor::backward(const Image& img, const Cache& k, std::span<const double> upstream,
                              ParamSet& grad, Image* d_image) const {
  if (upstream.size() != kTotalParams) {
    throw InvalidArgument("predictor backward: upstream must have 27 entries");
  }
  const std::size_t c = config_.channels;
  const double slope = config_.leaky_slope;

  std::vector<double> g_dec(kTotalParams);
  for (std::size_t i = 0; i < kTotalParams; ++i) {
    const double t = std::tanh(k.decoded[i]);
    g_dec[i] = upstream[i] * 0.5 * (1.0 - t * t);
  }
  outer_add(grad[kDecoderW], g_dec, k.latent);
  for (std::size_t i = 0; i < kTotalParams; ++i) grad[kDecoderB][i] += g_dec[i];
  std::vector<double> g_latent(config_.latent, 0.0);
  matvec_t_add(weights_[kDecoderW], g_dec, g_latent);

  outer_add(grad[kHead2W], g_latent, k.head_act);
  for (std::size_t i = 0; i < g_latent.size(); ++i) grad[kHead2B][i] += g_latent[i];
  std::vector<double> g_head(config_.head_hidden, 0.0);
  matvec_t_add(weights_[kHead2W], g_latent, g_head);
  for (std::size_t i = 0; i < g_head.size(); ++i) {
    if (k.head_pre[i] <= 0.0) g_head[i] = 0.0;
  }
  outer_add(grad[kHead1W], g_head, k.features);
  for (std::size_t i = 0; i < g_head.size(); ++i) grad[kHead1B][i] += g_head[i];
  std::vector<double> g_feat(8 * c, 0.0);
  matvec_t_add(weights_[kHead1W], g_head, g_feat);

  const std::size_t cells = map_size(3) * map_size(3);
  std::vector<double> g3(k.act3.size(), 0.0);
  for (std::size_t ch = 0; ch < 4 * c; ++ch) {
    const double avg = g_feat[ch] / static_cast<double>(cells);
    double* g = g3.data() + ch * cells;
    for (std::size_t i = 0; i < cells; ++i) g[i] = avg;
    g[k.max_index[ch]] += g_feat[4 * c + ch];
  }

  leaky_backward(k.pre3, g3, slope);
  std::vector<double> g2;
  conv_backward({2 * c, 4 * c, map_size(2), map_size(3)}, weights_[kConv3W], k.act2, g3,
                grad[kConv3W], grad[kConv3B], &g2);
  leaky_backward(k.pre2, g2, slope);
  std::vector<double> g1;
  conv_backward({c, 2 * c, map_size(1), map_size(2)}, weights_[kConv2W], k.act1, g2,
                grad[kConv2W], grad[kConv2B], &g1);
  leaky_backward(k.pre1, g1, slope);
  std::vector<double> g0;
  conv_backward({3, c, map_size(0), map_size(1)}, weights_[kConv1W], k.pooled, g1,
                grad[kConv1W], grad[kConv1B], d_image ? &g0 : nullptr);

  if (d_image) {
    const std::size_t size = config_.input_size;
    *d_image = Image(img.height(), img.width());
    for (std::size_t oy = 0; oy < size; ++oy) {
      const PoolRange ry = pool_range(oy, img.height(), size);
      for (std::size_t ox = 0; ox < size; ++ox) {
        const PoolRange rx = pool_range(ox, img.width(), size);
        const double inv =
            1.0 / static_cast<double>((ry.end - ry.begin) * (rx.end - rx.begin));
        for (std::size_t ch = 0; ch < 3; ++ch) {
          const double g = g0[(ch * size + oy) * size + ox] * inv;
          for (std::size_t y = ry.begin; y < ry.end; ++y) {
            for (std::size_t x = rx.begin; x < rx.end; ++x) d_image->at(y, x, ch) += g;
          }
        }
      }
    }
  }
}

}  // namespace seqisp
