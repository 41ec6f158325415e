#pragma once

#include "fracdeblur/grid.hpp"
#include "fracdeblur/kernel.hpp"

#include <cstdint>
#include <string>

namespace fracdeblur {

/// Uniform r1 x r2 box.
Kernel make_average_kernel(int r1, int r2);

/// hsize x hsize samples of a centred isotropic Gaussian, normalized.
Kernel make_gaussian_kernel(int hsize, double sigma);

/// Line of `length` pixels through the kernel centre at `angle_deg`
/// counterclockwise from the +x axis. Unit-spaced samples along the segment
/// are splatted bilinearly, then the kernel is normalized.
Kernel make_motion_kernel(int length, double angle_deg);

Kernel identity_kernel();

/// Parses "gaussian:H,S", "average:R,C", "motion:L,T" or "identity".
Kernel parse_kernel_spec(const std::string& spec);

/// Cross-channel presets: "lena", "house", "peppers", "plate" at the original
/// sizes, and "peppers-small" with the peppers weights and 5-pixel kernels.
ColorBlurSpec color_preset(const std::string& name);
bool is_color_preset(const std::string& name);

/// Three lines, one per output channel, each holding three
/// "weight*kernelspec" tokens separated by ';'.
ColorBlurSpec read_color_blur_file(const std::string& path);
ColorBlurSpec parse_color_blur(const std::string& text);

/// Periodic convolution of a single-channel image.
PixelGrid blur_gray(const PixelGrid& u, const Kernel& k);

/// out_i = sum_j weight_ij * (kernel_ij conv u_j), periodic.
PixelGrid blur_color(const PixelGrid& u, const ColorBlurSpec& spec);

enum class NoiseKind { SaltPepper, RandomValued };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::SaltPepper;
    double density = 0.0;
    std::uint64_t seed = 0;
};

/// Parses "sp:0.1" / "rv:0.3" (seed left at 0).
NoiseSpec parse_noise_spec(const std::string& spec);
std::string to_string(const NoiseSpec& spec);
std::string to_string(NoiseKind kind);

/// Each (pixel, channel) sample is replaced with probability `density`.
/// Draws are keyed by (seed, channel, pixel index), so the result does not
/// depend on traversal order.
PixelGrid add_impulse_noise(const PixelGrid& u, const NoiseSpec& spec);

/// Stateless 64-bit mixer used for keyed draws; exposed for tests.
std::uint64_t keyed_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

} // namespace fracdeblur
