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

#include "seqisp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "seqisp/error.hpp"

namespace seqisp {

namespace {

constexpr std::array<std::string_view, kNumModules> kNames{
    "Exposure",     "Gamma",   "ToneMap",     "Contrast",       "Saturation",
    "Desaturation", "WhiteBalance", "Denoise", "SharpenBlur", "ColorCorrection"};

constexpr double kContrastEps = 1e-6;
constexpr double kWbLow = 1.0 / 1.1;
constexpr double kWbHigh = 1.1;
constexpr double kCcmGuard = 1e-3;
constexpr double kDenoiseFdStep = 1e-3;

void check_params(ModuleId id, std::span<const double> raw) {
  if (raw.size() != param_count(id)) {
    throw InvalidArgument(std::string(module_name(id)) + ": expected " +
                          std::to_string(param_count(id)) + " parameters, got " +
                          std::to_string(raw.size()));
  }
}

void check_upstream(const Image& img, const Image& upstream) {
  if (!img.same_shape(upstream)) throw InvalidArgument("vjp: upstream shape mismatch");
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }
double clamp_grad(double v) { return (v >= 0.0 && v <= 1.0) ? 1.0 : 0.0; }

// ---------------------------------------------------------------- exposure

KernelGradients exposure_vjp(const Image& img, std::span<const double> raw, const Image& up) {
  const double gain = std::exp2(rescale::exposure(raw[0]));
  KernelGradients g{Image(img.height(), img.width()), {0.0}};
  double acc = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    g.d_input[i] = gain * up[i];
    acc += up[i] * img[i];
  }
  g.d_params[0] = acc * gain * std::numbers::ln2 * 7.0;
  return g;
}

// ------------------------------------------------------------------- gamma

KernelGradients gamma_vjp(const Image& img, std::span<const double> raw, const Image& up) {
  const double p = rescale::gamma(raw[0]);
  KernelGradients g{Image(img.height(), img.width()), {0.0}};
  double acc = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double x = img[i];
    if (x <= 0.0) continue;
    const double y = std::pow(x, p);
    g.d_input[i] = up[i] * p * y / x;
    acc += up[i] * y * std::log(x);
  }
  // dp/draw = p * 2 ln 3
  g.d_params[0] = acc * p * 2.0 * std::log(3.0);
  return g;
}

// ---------------------------------------------------------------- tone map

struct ToneCurve {
  std::array<double, 8> weights{};  // rescaled parameters
  double z = 0.0;
};

ToneCurve make_tone_curve(std::span<const double> raw) {
  ToneCurve c;
  for (int i = 0; i < 8; ++i) {
    c.weights[i] = rescale::tone(raw[i]);
    c.z += c.weights[i];
  }
  return c;
}

double tone_eval(const ToneCurve& c, double u) {
  double acc = 0.0;
  for (int i = 0; i < 8; ++i) acc += c.weights[i] * tone_basis(u, i + 1);
  return 8.0 / c.z * acc;
}

KernelGradients tonemap_vjp(const Image& img, std::span<const double> raw, const Image& up) {
  const ToneCurve c = make_tone_curve(raw);
  KernelGradients g{Image(img.height(), img.width()), std::vector<double>(8, 0.0)};
  std::array<double, 8> basis_acc{};
  double out_acc = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double x = img[i];
    const double u = clamp01(x);
    if (x >= 0.0 && x <= 1.0) {
      const auto seg = static_cast<std::size_t>(std::min(7.0, std::floor(u * 8.0)));
      g.d_input[i] = up[i] * 8.0 / c.z * c.weights[seg];
    }
    for (int k = 0; k < 8; ++k) basis_acc[k] += up[i] * tone_basis(u, k + 1);
    out_acc += up[i] * tone_eval(c, u);
  }
  // out = (8/Z) sum_k w_k b_k  =>  d out / d w_j = (8 b_j - out) / Z
  for (int j = 0; j < 8; ++j) {
    g.d_params[j] = (8.0 * basis_acc[j] - out_acc) / c.z * 1.5;
  }
  return g;
}

// ---------------------------------------------------------------- contrast

// Luminance-driven S-curve gain f(lum) = S(lum) / (lum+ + eps) and its
// derivative. Negative luminance is treated as 0 in the denominator.
struct ContrastGain {
  double value;
  double derivative;
};

ContrastGain contrast_gain(double lum) {
  const double s = (1.0 - std::cos(std::numbers::pi * lum)) / 2.0;
  const double ds = std::numbers::pi * std::sin(std::numbers::pi * lum) / 2.0;
  if (lum >= 0.0) {
    const double den = lum + kContrastEps;
    return {s / den, (ds * den - s) / (den * den)};
  }
  return {s / kContrastEps, ds / kContrastEps};
}

KernelGradients contrast_vjp(const Image& img, std::span<const double> raw, const Image& up) {
  const double c = rescale::contrast(raw[0]);
  KernelGradients g{Image(img.height(), img.width()), {0.0}};
  double acc = 0.0;
  for (std::size_t p = 0; p < img.pixels(); ++p) {
    const Rgb px = img.pixel(p);
    const Rgb gp = up.pixel(p);
    const ContrastGain f = contrast_gain(luminance(px));
    double up_dot_in = 0.0;
    for (int k = 0; k < 3; ++k) {
      up_dot_in += gp[k] * px[k];
      acc += gp[k] * (px[k] * f.value - px[k]);
    }
    for (int k = 0; k < 3; ++k) {
      g.d_input[3 * p + k] = gp[k] * ((1.0 - c) + c * f.value) +
                             c * up_dot_in * f.derivative * kLuminanceWeights[k];
    }
  }
  g.d_params[0] = acc * 2.0;
  return g;
}

// -------------------------------------------------------------- saturation

Rgb saturate_pixel(const Rgb& px) {
  const Rgb p{clamp01(px[0]), clamp01(px[1]), clamp01(px[2])};
  Hsv hsv = rgb_to_hsv(p);
  const double v = hsv.value;
  hsv.saturation = hsv.saturation + 0.8 * (1.0 - hsv.saturation) * (0.5 - std::abs(0.5 - v));
  return hsv_to_rgb(hsv);
}

// Adjoint of saturate_pixel with respect to the clamped pixel. Uses the
// closed form e_k = mx - (S_enh * mx / D) (mx - p_k), equivalent to the HSV
// round trip when D = mx - mn > 0. Ties choose the lowest channel index.
Rgb saturate_pixel_vjp(const Rgb& p, const Rgb& ge) {
  std::size_t imax = 0, imin = 0;
  for (std::size_t k = 1; k < 3; ++k) {
    if (p[k] > p[imax]) imax = k;
    if (p[k] < p[imin]) imin = k;
  }
  const double mx = p[imax];
  const double mn = p[imin];
  const double dq_dv = mx <= 0.5 ? 1.0 : -1.0;
  const double q = 0.5 - std::abs(0.5 - mx);
  Rgb gp{0.0, 0.0, 0.0};

  if (mx == mn) {
    // Hue 0: e = (V, V (1 - S_enh), V (1 - S_enh)), S_enh = 0.8 q(V).
    const double s_enh = 0.8 * q;
    const double d_low = (1.0 - s_enh) - mx * 0.8 * dq_dv;
    gp[imax] += ge[0] + (ge[1] + ge[2]) * d_low;
    return gp;
  }

  const double d = mx - mn;
  const double s = d / mx;
  const double s_enh = s + 0.8 * (1.0 - s) * q;
  const double a = s_enh * mx / d;

  double g_mx = 0.0, g_a = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    g_mx += ge[k] * (1.0 - a);
    g_a -= ge[k] * (mx - p[k]);
    gp[k] += ge[k] * a;
  }
  const double g_senh = g_a * mx / d;
  g_mx += g_a * s_enh / d;
  double g_d = -g_a * s_enh * mx / (d * d);
  const double g_s = g_senh * (1.0 - 0.8 * q);
  const double g_q = g_senh * 0.8 * (1.0 - s);
  g_mx += g_q * dq_dv;
  g_d += g_s / mx;
  g_mx -= g_s * d / (mx * mx);
  g_mx += g_d;
  const double g_mn = -g_d;
  gp[imax] += g_mx;
  gp[imin] += g_mn;
  return gp;
}

KernelGradients saturation_vjp(const Image& img, std::span<const double> raw, const Image& up) {
  const double t = raw[0];
  KernelGradients g{Image(img.height(), img.width()), {0.0}};
  double acc = 0.0;
  for (std::size_t p = 0; p < img.pixels(); ++p) {
    const Rgb px = img.pixel(p);
    const Rgb gp = up.pixel(p);
    const Rgb enh = saturate_pixel(px);
    const Rgb clamped{clamp01(px[0]), clamp01(px[1]), clamp01(px[2])};
    const Rgb ge{t * gp[0], t * gp[1], t * gp[2]};
    const Rgb gc = saturate_pixel_vjp(clamped, ge);
    for (int k = 0; k < 3; ++k) {
      acc += gp[k] * (enh[k] - px[k]);
      g.d_input[3 * p + k] = (1.0 - t) * gp[k] + gc[k] * clamp_grad(px[k]);
    }
  }
  g.d_params[0] = acc;
  return g;
}

// ------------------------------------------------------------ desaturation

KernelGradients desaturation_vjp(const Image& img, std::span<const double> raw,
                                 const Image& up) {
  const double t = raw[0];
  KernelGradients g{Image(img.height(), img.width()), {0.0}};
  double acc = 0.0;
  for (std::size_t p = 0; p < img.pixels(); ++p) {
    const Rgb px = img.pixel(p);
    const Rgb gp = up.pixel(p);
    const double lum = luminance(px);
    const double gsum = gp[0] + gp[1] + gp[2];
    for (int k = 0; k < 3; ++k) {
      acc += gp[k] * (lum - px[k]);
      g.d_input[3 * p + k] = (1.0 - t) * gp[k] + t * kLuminanceWeights[k] * gsum;
    }
  }
  g.d_params[0] = acc;
  return g;
}

// ----------------------------------------------------------- white balance

std::array<double, 3> wb_gains(std::span<const double> raw) {
  std::array<double, 3> t{};
  for (int k = 0; k < 3; ++k) t[k] = rescale::white_balance(raw[k]);
  const double den = luminance(t);
  return {t[0] / den, t[1] / den, t[2] / den};
}

KernelGradients whitebalance_vjp(const Image& img, std::span<const double> raw,
                                 const Image& up) {
  std::array<double, 3> t{};
  for (int k = 0; k < 3; ++k) t[k] = rescale::white_balance(raw[k]);
  const double den = luminance(t);
  KernelGradients g{Image(img.height(), img.width()), std::vector<double>(3, 0.0)};
  std::array<double, 3> gain_grad{};
  for (std::size_t p = 0; p < img.pixels(); ++p) {
    for (int k = 0; k < 3; ++k) {
      const std::size_t i = 3 * p + k;
      g.d_input[i] = t[k] / den * up[i];
      gain_grad[k] += up[i] * img[i];
    }
  }
  double weighted = 0.0;
  for (int k = 0; k < 3; ++k) weighted += gain_grad[k] * t[k];
  for (int j = 0; j < 3; ++j) {
    const double d_t = gain_grad[j] / den - weighted * kLuminanceWeights[j] / (den * den);
    g.d_params[j] = d_t * (kWbHigh - kWbLow);
  }
  return g;
}

// -------------------------------------------------------------------- ccm

KernelGradients ccm_vjp(const Image& img, std::span<const double> raw, const Image& up) {
  std::array<double, 9> t{};
  for (int k = 0; k < 9; ++k) t[k] = rescale::ccm(raw[k]);
  const std::array<double, 9> m = ccm_matrix(raw);
  KernelGradients g{Image(img.height(), img.width()), std::vector<double>(9, 0.0)};
  std::array<double, 9> m_grad{};
  for (std::size_t p = 0; p < img.pixels(); ++p) {
    const Rgb px = img.pixel(p);
    const Rgb gp = up.pixel(p);
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (int r = 0; r < 3; ++r) acc += m[3 * r + c] * gp[r];
      g.d_input[3 * p + c] = acc;
    }
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m_grad[3 * r + c] += gp[r] * px[c];
    }
  }
  for (int r = 0; r < 3; ++r) {
    const double s = t[3 * r] + t[3 * r + 1] + t[3 * r + 2];
    const bool guarded = std::abs(s) < kCcmGuard;
    const double sg = guarded ? (s < 0.0 ? -kCcmGuard : kCcmGuard) : s;
    double cross = 0.0;
    for (int c = 0; c < 3; ++c) cross += m_grad[3 * r + c] * t[3 * r + c];
    for (int c = 0; c < 3; ++c) {
      double d = m_grad[3 * r + c] / sg;
      if (!guarded) d -= cross / (sg * sg);
      g.d_params[3 * r + c] = 4.0 * d;
    }
  }
  return g;
}

KernelGradients sharpenblur_vjp(const Image& img, std::span<const double> raw,
                                const Image& up);

}  // namespace

namespace rescale {
double exposure(double raw) { return 7.0 * raw - 3.5; }
double gamma(double raw) { return std::pow(3.0, 2.0 * raw - 1.0); }
double tone(double raw) { return 0.5 + 1.5 * raw; }
double contrast(double raw) { return 2.0 * raw - 1.0; }
double white_balance(double raw) { return kWbLow + raw * (kWbHigh - kWbLow); }
double denoise(double raw) { return 1e-5 + (1.0 - 1e-5) * raw; }
double sharpen(double raw) { return 1e-5 + (10.0 - 1e-5) * raw; }
double ccm(double raw) { return 4.0 * raw - 2.0; }
}  // namespace rescale

std::string_view module_name(ModuleId id) { return kNames[index_of(id)]; }

std::optional<ModuleId> module_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumModules; ++i) {
    if (kNames[i] == name) return kAllModules[i];
  }
  return std::nullopt;
}

double tone_basis(double u, int i) {
  const double x = clamp01(u);
  return std::max(0.0, std::min(x - (i - 1) / 8.0, 1.0 / 8.0));
}

std::array<double, 9> ccm_matrix(std::span<const double> raw) {
  std::array<double, 9> m{};
  for (int r = 0; r < 3; ++r) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) {
      m[3 * r + c] = rescale::ccm(raw[3 * r + c]);
      s += m[3 * r + c];
    }
    if (std::abs(s) < kCcmGuard) s = s < 0.0 ? -kCcmGuard : kCcmGuard;
    for (int c = 0; c < 3; ++c) m[3 * r + c] /= s;
  }
  return m;
}

Image exposure_forward(const Image& img, std::span<const double> raw) {
  check_params(ModuleId::Exposure, raw);
  const double gain = std::exp2(rescale::exposure(raw[0]));
  Image out = img;
  for (double& v : out.data()) v *= gain;
  return out;
}

Image gamma_forward(const Image& img, std::span<const double> raw) {
  check_params(ModuleId::Gamma, raw);
  const double p = rescale::gamma(raw[0]);
  Image out = img;
  for (double& v : out.data()) v = std::pow(std::max(v, 0.0), p);
  return out;
}

Image tonemap_forward(const Image& img, std::span<const double> raw) {
  check_params(ModuleId::ToneMap, raw);
  const ToneCurve c = make_tone_curve(raw);
  Image out = img;
  for (double& v : out.data()) v = tone_eval(c, v);
  return out;
}

Image contrast_forward(const Image& img, std::span<const double> raw) {
  check_params(ModuleId::Contrast, raw);
  const double c = rescale::contrast(raw[0]);
  Image out = img;
  for (std::size_t p = 0; p < img.pixels(); ++p) {
    const Rgb px = img.pixel(p);
    const double f = contrast_gain(luminance(px)).value;
    for (int k = 0; k < 3; ++k) out[3 * p + k] = (1.0 - c) * px[k] + c * px[k] * f;
  }
  return out;
}

Image saturation_forward(const Image& img, std::span<const double> raw) {
  check_params(ModuleId::Saturation, raw);
  const double t = raw[0];
  Image out = img;
  for (std::size_t p = 0; p < img.pixels(); ++p) {
    const Rgb px = img.pixel(p);
    const Rgb enh = saturate_pixel(px);
    for (int k = 0; k < 3; ++k) out[3 * p + k] = (1.0 - t) * px[k] + t * enh[k];
  }
  return out;
}

Image desaturation_forward(const Image& img, std::span<const double> raw) {
  check_params(ModuleId::Desaturation, raw);
  const double t = raw[0];
  Image out = img;
  for (std::size_t p = 0; p < img.pixels(); ++p) {
    const Rgb px = img.pixel(p);
    const double lum = luminance(px);
    for (int k = 0; k < 3; ++k) out[3 * p + k] = (1.0 - t) * px[k] + t * lum;
  }
  return out;
}

Image whitebalance_forward(const Image& img, std::span<const double> raw) {
  check_params(ModuleId::WhiteBalance, raw);
  const auto gains = wb_gains(raw);
  Image out = img;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= gains[i % 3];
  return out;
}

Image denoise_forward(const Image& img, std::span<const double> raw) {
  check_params(ModuleId::Denoise, raw);
  return nonlocal_means(img, rescale::denoise(raw[0]));
}

Image sharpenblur_forward(const Image& img, std::span<const double> raw) {
  check_params(ModuleId::SharpenBlur, raw);
  const double s = rescale::sharpen(raw[0]);
  const Image blurred = blur3x3(img);
  Image out = img;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * img[i] + (1.0 - s) * blurred[i];
  return out;
}

Image ccm_forward(const Image& img, std::span<const double> raw) {
  check_params(ModuleId::ColorCorrection, raw);
  const auto m = ccm_matrix(raw);
  Image out = img;
  for (std::size_t p = 0; p < img.pixels(); ++p) {
    const Rgb px = img.pixel(p);
    for (int r = 0; r < 3; ++r) {
      out[3 * p + r] = m[3 * r] * px[0] + m[3 * r + 1] * px[1] + m[3 * r + 2] * px[2];
    }
  }
  return out;
}

Image module_forward(ModuleId id, const Image& img, std::span<const double> raw) {
  switch (id) {
    case ModuleId::Exposure: return exposure_forward(img, raw);
    case ModuleId::Gamma: return gamma_forward(img, raw);
    case ModuleId::ToneMap: return tonemap_forward(img, raw);
    case ModuleId::Contrast: return contrast_forward(img, raw);
    case ModuleId::Saturation: return saturation_forward(img, raw);
    case ModuleId::Desaturation: return desaturation_forward(img, raw);
    case ModuleId::WhiteBalance: return whitebalance_forward(img, raw);
    case ModuleId::Denoise: return denoise_forward(img, raw);
    case ModuleId::SharpenBlur: return sharpenblur_forward(img, raw);
    case ModuleId::ColorCorrection: return ccm_forward(img, raw);
  }
  throw InvalidArgument("unknown module id");
}

namespace {

KernelGradients sharpenblur_vjp(const Image& img, std::span<const double> raw,
                                const Image& up) {
  const double s = rescale::sharpen(raw[0]);
  const Image blurred = blur3x3(img);
  KernelGradients g{Image(img.height(), img.width()), {0.0}};
  double acc = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) acc += up[i] * (img[i] - blurred[i]);
  g.d_params[0] = acc * (10.0 - 1e-5);

  // Adjoint of replicate-padded convolution: scatter into clamped taps.
  const auto h = static_cast<long>(img.height());
  const auto w = static_cast<long>(img.width());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      for (int k = 0; k < 3; ++k) {
        const double gv = up.at(y, x, k);
        g.d_input.at(y, x, k) += s * gv;
        const double gb = (1.0 - s) * gv;
        for (int dy = -1; dy <= 1; ++dy) {
          const long sy = std::clamp(y + dy, 0L, h - 1);
          for (int dx = -1; dx <= 1; ++dx) {
            const long sx = std::clamp(x + dx, 0L, w - 1);
            g.d_input.at(sy, sx, k) += kBlurKernel[(dy + 1) * 3 + (dx + 1)] * gb;
          }
        }
      }
    }
  }
  return g;
}

}  // namespace

// Defined in spatial.cpp.
KernelGradients denoise_vjp_impl(const Image& img, double raw, double fd_step, const Image& up);

KernelGradients module_vjp(ModuleId id, const Image& img, std::span<const double> raw,
                           const Image& upstream) {
  check_params(id, raw);
  check_upstream(img, upstream);
  switch (id) {
    case ModuleId::Exposure: return exposure_vjp(img, raw, upstream);
    case ModuleId::Gamma: return gamma_vjp(img, raw, upstream);
    case ModuleId::ToneMap: return tonemap_vjp(img, raw, upstream);
    case ModuleId::Contrast: return contrast_vjp(img, raw, upstream);
    case ModuleId::Saturation: return saturation_vjp(img, raw, upstream);
    case ModuleId::Desaturation: return desaturation_vjp(img, raw, upstream);
    case ModuleId::WhiteBalance: return whitebalance_vjp(img, raw, upstream);
    case ModuleId::Denoise: return denoise_vjp_impl(img, raw[0], kDenoiseFdStep, upstream);
    case ModuleId::SharpenBlur: return sharpenblur_vjp(img, raw, upstream);
    case ModuleId::ColorCorrection: return ccm_vjp(img, raw, upstream);
  }
  throw InvalidArgument("unknown module id");
}

}  // namespace seqisp
