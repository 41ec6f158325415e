#include "fracdeblur/framelet.hpp"

#include "fracdeblur/errors.hpp"

#include <cmath>
#include <numbers>

namespace fracdeblur {

namespace {

using Mask = std::array<double, 3>;

int wrap(int i, int n) { return i < 0 ? i + n : (i >= n ? i - n : i); }

// conv(x, h)[n] = sum_t h[t] x[n - t]; corr is its transpose.
PixelGrid filter_rows(const PixelGrid& x, const Mask& h, bool transpose) {
    const int H = x.height();
    const int W = x.width();
    PixelGrid out(H, W, 1);
    const int sign = transpose ? 1 : -1;
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            double s = 0.0;
            for (int t = -1; t <= 1; ++t) s += h[t + 1] * x(wrap(r + sign * t, H), c);
            out(r, c) = s;
        }
    return out;
}

PixelGrid filter_cols(const PixelGrid& x, const Mask& h, bool transpose) {
    const int H = x.height();
    const int W = x.width();
    PixelGrid out(H, W, 1);
    const int sign = transpose ? 1 : -1;
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            double s = 0.0;
            for (int t = -1; t <= 1; ++t) s += h[t + 1] * x(r, wrap(c + sign * t, W));
            out(r, c) = s;
        }
    return out;
}

} // namespace

FrameletCoeffs::FrameletCoeffs(int height, int width) {
    for (auto& b : bands) b = PixelGrid(height, width, 1);
}

const std::array<std::array<double, 3>, 3>& framelet_masks() {
    static const std::array<std::array<double, 3>, 3> masks = {{
        {0.25, 0.5, 0.25},
        {std::numbers::sqrt2 / 4.0, 0.0, -std::numbers::sqrt2 / 4.0},
        {-0.25, 0.5, -0.25},
    }};
    return masks;
}

FrameletCoeffs analysis(const PixelGrid& u) {
    if (u.channels() != 1) throw UsageError("framelet analysis expects a single channel");
    const auto& h = framelet_masks();
    FrameletCoeffs out;
    for (int i = 0; i < 3; ++i) {
        const PixelGrid vertical = filter_rows(u, h[i], false);
        for (int j = 0; j < 3; ++j) out.subband(i, j) = filter_cols(vertical, h[j], false);
    }
    return out;
}

PixelGrid synthesis(const FrameletCoeffs& c) {
    const auto& h = framelet_masks();
    const int H = c.bands[0].height();
    const int W = c.bands[0].width();
    PixelGrid out(H, W, 1);
    for (int i = 0; i < 3; ++i) {
        PixelGrid horizontal(H, W, 1);
        for (int j = 0; j < 3; ++j) {
            require_same_shape(c.subband(i, j), out, "framelet synthesis");
            horizontal = horizontal + filter_cols(c.subband(i, j), h[j], true);
        }
        out = out + filter_rows(horizontal, h[i], true);
    }
    return out;
}

double norm1(const FrameletCoeffs& c) {
    double s = 0.0;
    for (const auto& b : c.bands) s += norm1(b);
    return s;
}

double norm2(const FrameletCoeffs& c) {
    double s = 0.0;
    for (const auto& b : c.bands) {
        const double n = norm2(b);
        s += n * n;
    }
    return std::sqrt(s);
}

double inner(const FrameletCoeffs& a, const FrameletCoeffs& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.bands.size(); ++k) s += inner(a.bands[k], b.bands[k]);
    return s;
}

} // namespace fracdeblur
