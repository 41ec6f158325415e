#include "fracdeblur/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace fracdeblur {

PixelGrid make_synthetic_image(int height, int width, int channels) {
    PixelGrid g(height, width, channels);
    // Per-channel intensities of background, disc, rectangle, triangle, stripes.
    constexpr std::array<std::array<double, 5>, 3> tint = {{
        {0.25, 0.85, 0.10, 0.60, 0.70},
        {0.30, 0.40, 0.75, 0.20, 0.55},
        {0.45, 0.20, 0.35, 0.90, 0.40},
    }};
    for (int ch = 0; ch < channels; ++ch) {
        const auto& t = channels == 1 ? std::array<double, 5>{0.2, 0.85, 0.1, 0.6, 0.5} : tint[std::size_t(ch)];
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                const double y = (r + 0.5) / height;
                const double x = (c + 0.5) / width;
                double v = t[0] + 0.2 * x * y;

                if ((x - 0.35) * (x - 0.35) + (y - 0.35) * (y - 0.35) < 0.04) v = t[1] - 0.15 * y;
                if (x > 0.55 && x < 0.9 && y > 0.15 && y < 0.45) v = t[2] + 0.1 * x;
                // triangle with corners (0.15,0.9), (0.5,0.55), (0.5,0.9)
                if (y < 0.9 && x < 0.5 && y > 0.55 && (y - 0.55) >= (0.5 - x)) v = t[3];
                if (x > 0.6 && x < 0.9 && y > 0.6 && y < 0.9)
                    v = t[4] + 0.25 * std::sin(2.0 * std::numbers::pi * 6.0 * x);
                g(r, c, ch) = std::clamp(v, 0.0, 1.0);
            }
        }
    }
    return g;
}

} // namespace fracdeblur
