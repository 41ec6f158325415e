#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fracdeblur {

using Complex = std::complex<double>;

/// H x W x C real image, row-major within a channel, channels stored one
/// after another (all of r, then g, then b).
class PixelGrid {
public:
    PixelGrid() = default;
    PixelGrid(int height, int width, int channels = 1, double fill = 0.0);
    PixelGrid(int height, int width, int channels, std::vector<double> data);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    int channels() const noexcept { return channels_; }
    std::size_t plane_size() const noexcept { return std::size_t(height_) * width_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(int row, int col, int ch = 0) noexcept {
        return data_[index(row, col, ch)];
    }
    double operator()(int row, int col, int ch = 0) const noexcept {
        return data_[index(row, col, ch)];
    }
    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> channel(int ch) noexcept {
        return {data_.data() + ch * plane_size(), plane_size()};
    }
    std::span<const double> channel(int ch) const noexcept {
        return {data_.data() + ch * plane_size(), plane_size()};
    }

    /// Copy of one channel as a single-channel grid.
    PixelGrid extract_channel(int ch) const;
    void set_channel(int ch, const PixelGrid& plane);

    bool same_shape(const PixelGrid& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_ &&
               channels_ == other.channels_;
    }
    bool all_finite() const noexcept;

    friend bool operator==(const PixelGrid&, const PixelGrid&) = default;

private:
    std::size_t index(int row, int col, int ch) const noexcept {
        return std::size_t(ch) * plane_size() + std::size_t(row) * width_ + col;
    }

    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

/// Complex counterpart of PixelGrid; carries spectra.
class ComplexGrid {
public:
    ComplexGrid() = default;
    ComplexGrid(int height, int width, int channels = 1, Complex fill = {});

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    int channels() const noexcept { return channels_; }
    std::size_t plane_size() const noexcept { return std::size_t(height_) * width_; }
    std::size_t size() const noexcept { return data_.size(); }

    Complex& operator()(int row, int col, int ch = 0) noexcept {
        return data_[std::size_t(ch) * plane_size() + std::size_t(row) * width_ + col];
    }
    Complex operator()(int row, int col, int ch = 0) const noexcept {
        return data_[std::size_t(ch) * plane_size() + std::size_t(row) * width_ + col];
    }
    Complex& operator[](std::size_t i) noexcept { return data_[i]; }
    Complex operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<Complex> data() noexcept { return data_; }
    std::span<const Complex> data() const noexcept { return data_; }
    std::span<Complex> channel(int ch) noexcept {
        return {data_.data() + ch * plane_size(), plane_size()};
    }
    std::span<const Complex> channel(int ch) const noexcept {
        return {data_.data() + ch * plane_size(), plane_size()};
    }

    bool same_shape(const ComplexGrid& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_ &&
               channels_ == other.channels_;
    }

private:
    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<Complex> data_;
};

double norm2(const PixelGrid& g);
double norm1(const PixelGrid& g);
double inner(const PixelGrid& a, const PixelGrid& b);

/// alpha * x + y
PixelGrid axpy(double alpha, const PixelGrid& x, const PixelGrid& y);
PixelGrid operator+(const PixelGrid& a, const PixelGrid& b);
PixelGrid operator-(const PixelGrid& a, const PixelGrid& b);
PixelGrid operator*(double s, const PixelGrid& a);
PixelGrid clamp01(const PixelGrid& g);

/// Throws UsageError when shapes differ.
void require_same_shape(const PixelGrid& a, const PixelGrid& b, const char* what);

} // namespace fracdeblur
