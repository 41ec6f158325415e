#pragma once

#include "fracdeblur/grid.hpp"

#include <string>

namespace fracdeblur {

struct Image {
    PixelGrid pixels;   // intensities divided by max_value
    int max_value = 255; // 255 or 65535
};

/// Reads PNG (8/16-bit gray, gray+alpha, RGB, RGBA, palette) or PGM/PPM
/// (P2, P3, P5, P6). Alpha is dropped. Throws IoError.
Image read_image(const std::string& path);

/// Writes by extension: .png (8 or 16-bit), .pgm/.ppm (ASCII P2/P3).
/// Values are clamped to [0,1] and rounded to max_value levels.
void write_image(const std::string& path, const PixelGrid& pixels, int max_value = 255);

} // namespace fracdeblur
