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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "seqisp/image.hpp"

namespace seqisp {

/// The candidate ISP modules. The numeric order fixes the layout of the
/// concatenated parameter vector and the policy's action indices.
enum class ModuleId : int {
  Exposure = 0,
  Gamma,
  ToneMap,
  Contrast,
  Saturation,
  Desaturation,
  WhiteBalance,
  Denoise,
  SharpenBlur,
  ColorCorrection,
};

inline constexpr std::size_t kNumModules = 10;
inline constexpr std::size_t kTotalParams = 27;

inline constexpr std::array<ModuleId, kNumModules> kAllModules{
    ModuleId::Exposure,     ModuleId::Gamma,        ModuleId::ToneMap,
    ModuleId::Contrast,     ModuleId::Saturation,   ModuleId::Desaturation,
    ModuleId::WhiteBalance, ModuleId::Denoise,      ModuleId::SharpenBlur,
    ModuleId::ColorCorrection};

inline constexpr std::array<std::size_t, kNumModules> kParamCounts{1, 1, 8, 1, 1, 1, 3, 1, 1, 9};
inline constexpr std::array<std::size_t, kNumModules> kParamOffsets{0,  1,  2,  10, 11,
                                                                    12, 13, 16, 17, 18};

constexpr std::size_t index_of(ModuleId id) { return static_cast<std::size_t>(id); }
constexpr std::size_t param_count(ModuleId id) { return kParamCounts[index_of(id)]; }
constexpr std::size_t param_offset(ModuleId id) { return kParamOffsets[index_of(id)]; }

std::string_view module_name(ModuleId id);
/// Case-sensitive lookup by the canonical name ("Exposure", "WhiteBalance", ...).
std::optional<ModuleId> module_from_name(std::string_view name);

/// Gradients of a scalar loss with respect to a kernel's input image and raw
/// ([0,1]-normalized) parameters.
struct KernelGradients {
  Image d_input;
  std::vector<double> d_params;
};

// Rescale maps from raw [0,1] parameters to module ranges.
namespace rescale {
double exposure(double raw);      // [-3.5, 3.5] stops
double gamma(double raw);         // 3^(2 raw - 1) in [1/3, 3]
double tone(double raw);          // [0.5, 2]
double contrast(double raw);      // [-1, 1]
double white_balance(double raw); // [1/1.1, 1.1]
double denoise(double raw);       // [1e-5, 1]
double sharpen(double raw);       // [1e-5, 10]
double ccm(double raw);           // [-2, 2]
}  // namespace rescale

/// Piecewise-linear tone basis b_i(u), i in 1..8, u clamped to [0, 1].
double tone_basis(double u, int i);

/// The 3x3 blur kernel (1/13)[[1,1,1],[1,5,1],[1,1,1]], row-major.
inline constexpr std::array<double, 9> kBlurKernel{1.0 / 13, 1.0 / 13, 1.0 / 13,
                                                   1.0 / 13, 5.0 / 13, 1.0 / 13,
                                                   1.0 / 13, 1.0 / 13, 1.0 / 13};

/// Row-normalized colour-correction matrix built from nine raw parameters.
std::array<double, 9> ccm_matrix(std::span<const double> raw);

Image exposure_forward(const Image& img, std::span<const double> raw);
Image gamma_forward(const Image& img, std::span<const double> raw);
Image tonemap_forward(const Image& img, std::span<const double> raw);
Image contrast_forward(const Image& img, std::span<const double> raw);
Image saturation_forward(const Image& img, std::span<const double> raw);
Image desaturation_forward(const Image& img, std::span<const double> raw);
Image whitebalance_forward(const Image& img, std::span<const double> raw);
Image denoise_forward(const Image& img, std::span<const double> raw);
Image sharpenblur_forward(const Image& img, std::span<const double> raw);
Image ccm_forward(const Image& img, std::span<const double> raw);

/// 3x3 blur with replicate padding.
Image blur3x3(const Image& img);

/// Non-local means with a 7x7 search window and 3x3 patches, replicate
/// padding, weights exp(-d^2 / h^2). `strength` is the rescaled h.
Image nonlocal_means(const Image& img, double strength);

/// Dispatches to the module's forward map. `raw` has param_count(id) entries.
Image module_forward(ModuleId id, const Image& img, std::span<const double> raw);

/// Reverse-mode product of `upstream` with the Jacobians of module_forward.
/// Denoise is special: d_input treats the NLM weights as constants and
/// d_params is a central difference with step 1e-3.
KernelGradients module_vjp(ModuleId id, const Image& img, std::span<const double> raw,
                           const Image& upstream);

}  // namespace seqisp
