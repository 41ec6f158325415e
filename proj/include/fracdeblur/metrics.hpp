#pragma once

#include "fracdeblur/grid.hpp"

#include <optional>

namespace fracdeblur {

/// Decibel results are clamped to [-99, 99]; identical inputs give 99.
inline constexpr double kDecibelCap = 99.0;

struct QualityReport {
    double psnr = 0.0;
    double snr = 0.0;
    double isnr = 0.0;
    double reerr = 0.0;
    double ssim = 0.0;
    std::optional<double> fsim; // only when requested
};

/// |candidate - reference|^2 / |reference|^2. Throws on an all-zero reference.
double reerr(const PixelGrid& candidate, const PixelGrid& reference);

/// 10 log10(1 / MSE), peak 1.
double psnr(const PixelGrid& candidate, const PixelGrid& reference);

/// 10 log10(sum (ref - mean ref)^2 / sum (ref - cand)^2).
double snr(const PixelGrid& candidate, const PixelGrid& reference);

/// 10 log10(|degraded - ref|^2 / |candidate - ref|^2).
double isnr(const PixelGrid& candidate, const PixelGrid& reference, const PixelGrid& degraded);

/// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
/// peak 1, valid-region windows only. Colour: mean over channels.
double ssim(const PixelGrid& candidate, const PixelGrid& reference);

/// Feature similarity on the luminance channel (inputs scaled to 0..255).
double fsim(const PixelGrid& candidate, const PixelGrid& reference);

/// Phase congruency map of a single-channel 0..255 image (4 scales,
/// 4 orientations of log-Gabor filters). Exposed for tests.
PixelGrid phase_congruency(const PixelGrid& image);

QualityReport evaluate(const PixelGrid& candidate, const PixelGrid& reference,
                       const PixelGrid& degraded, bool with_fsim);

} // namespace fracdeblur
