#include "fracdeblur/grid.hpp"

#include "fracdeblur/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fracdeblur {

namespace {

void check_dims(int height, int width, int channels) {
    if (height <= 0 || width <= 0)
        throw UsageError("grid dimensions must be positive, got " + std::to_string(height) +
                         "x" + std::to_string(width));
    if (channels != 1 && channels != 3)
        throw UsageError("grid channel count must be 1 or 3, got " + std::to_string(channels));
}

} // namespace

PixelGrid::PixelGrid(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
    check_dims(height, width, channels);
    data_.assign(std::size_t(height) * width * channels, fill);
}

PixelGrid::PixelGrid(int height, int width, int channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
    check_dims(height, width, channels);
    if (data_.size() != std::size_t(height) * width * channels)
        throw UsageError("grid data length does not match height*width*channels");
}

PixelGrid PixelGrid::extract_channel(int ch) const {
    auto src = channel(ch);
    return PixelGrid(height_, width_, 1, std::vector<double>(src.begin(), src.end()));
}

void PixelGrid::set_channel(int ch, const PixelGrid& plane) {
    if (plane.height() != height_ || plane.width() != width_ || plane.channels() != 1)
        throw UsageError("set_channel: plane shape mismatch");
    std::ranges::copy(plane.data(), channel(ch).begin());
}

bool PixelGrid::all_finite() const noexcept {
    return std::ranges::all_of(data_, [](double v) { return std::isfinite(v); });
}

ComplexGrid::ComplexGrid(int height, int width, int channels, Complex fill)
    : height_(height), width_(width), channels_(channels) {
    check_dims(height, width, channels);
    data_.assign(std::size_t(height) * width * channels, fill);
}

void require_same_shape(const PixelGrid& a, const PixelGrid& b, const char* what) {
    if (!a.same_shape(b))
        throw UsageError(std::string(what) + ": shape mismatch (" + std::to_string(a.height()) +
                         "x" + std::to_string(a.width()) + "x" + std::to_string(a.channels()) +
                         " vs " + std::to_string(b.height()) + "x" + std::to_string(b.width()) +
                         "x" + std::to_string(b.channels()) + ")");
}

double norm2(const PixelGrid& g) {
    double s = 0.0;
    for (double v : g.data()) s += v * v;
    return std::sqrt(s);
}

double norm1(const PixelGrid& g) {
    double s = 0.0;
    for (double v : g.data()) s += std::abs(v);
    return s;
}

double inner(const PixelGrid& a, const PixelGrid& b) {
    require_same_shape(a, b, "inner");
    auto x = a.data();
    auto y = b.data();
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

PixelGrid axpy(double alpha, const PixelGrid& x, const PixelGrid& y) {
    require_same_shape(x, y, "axpy");
    PixelGrid out = y;
    auto o = out.data();
    auto xs = x.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += alpha * xs[i];
    return out;
}

PixelGrid operator+(const PixelGrid& a, const PixelGrid& b) { return axpy(1.0, a, b); }

PixelGrid operator-(const PixelGrid& a, const PixelGrid& b) { return axpy(-1.0, b, a); }

PixelGrid operator*(double s, const PixelGrid& a) {
    PixelGrid out = a;
    for (double& v : out.data()) v *= s;
    return out;
}

PixelGrid clamp01(const PixelGrid& g) {
    PixelGrid out = g;
    for (double& v : out.data()) v = std::clamp(v, 0.0, 1.0);
    return out;
}

} // namespace fracdeblur
