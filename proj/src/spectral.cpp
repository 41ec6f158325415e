#include "fracdeblur/spectral.hpp"

#include "fracdeblur/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

namespace fracdeblur {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per (height, width, direction) and kept for the
// lifetime of the process.
fftw_plan cached_plan(int height, int width, int sign) {
    static std::mutex mutex;
    static std::map<std::tuple<int, int, int>, fftw_plan> plans;

    std::lock_guard lock(mutex);
    auto key = std::make_tuple(height, width, sign);
    if (auto it = plans.find(key); it != plans.end()) return it->second;

    std::vector<Complex> in(std::size_t(height) * width), out(in.size());
    fftw_plan plan = fftw_plan_dft_2d(height, width, reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw NumericalError("FFTW failed to create a plan");
    plans.emplace(key, plan);
    return plan;
}

void transform_planes(const ComplexGrid& in, ComplexGrid& out, int sign) {
    fftw_plan plan = cached_plan(in.height(), in.width(), sign);
    for (int ch = 0; ch < in.channels(); ++ch) {
        // FFTW takes a non-const input pointer but does not modify it for
        // out-of-place transforms planned with FFTW_ESTIMATE.
        auto* src = const_cast<Complex*>(in.channel(ch).data());
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(src),
                         reinterpret_cast<fftw_complex*>(out.channel(ch).data()));
    }
}

} // namespace

ComplexGrid dft2(const ComplexGrid& g) {
    ComplexGrid out(g.height(), g.width(), g.channels());
    transform_planes(g, out, FFTW_FORWARD);
    return out;
}

ComplexGrid dft2(const PixelGrid& g) {
    ComplexGrid in(g.height(), g.width(), g.channels());
    std::ranges::copy(g.data(), in.data().begin());
    return dft2(in);
}

PixelGrid idft2(const ComplexGrid& spectrum) {
    ComplexGrid tmp(spectrum.height(), spectrum.width(), spectrum.channels());
    transform_planes(spectrum, tmp, FFTW_BACKWARD);
    PixelGrid out(spectrum.height(), spectrum.width(), spectrum.channels());
    const double scale = 1.0 / double(spectrum.plane_size());
    auto src = tmp.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i].real() * scale;
    return out;
}

ComplexGrid idft2_complex(const ComplexGrid& spectrum) {
    ComplexGrid out(spectrum.height(), spectrum.width(), spectrum.channels());
    transform_planes(spectrum, out, FFTW_BACKWARD);
    const double scale = 1.0 / double(spectrum.plane_size());
    for (auto& v : out.data()) v *= scale;
    return out;
}

ComplexGrid kernel_to_otf(const Kernel& k, int h, int w) {
    if (k.rows > h || k.cols > w)
        throw UsageError("kernel " + std::to_string(k.rows) + "x" + std::to_string(k.cols) +
                         " is larger than the " + std::to_string(h) + "x" + std::to_string(w) +
                         " image");
    PixelGrid padded(h, w, 1);
    const int cr = k.rows / 2;
    const int cc = k.cols / 2;
    for (int r = 0; r < k.rows; ++r) {
        for (int c = 0; c < k.cols; ++c) {
            const int rr = ((r - cr) % h + h) % h;
            const int wc = ((c - cc) % w + w) % w;
            padded(rr, wc) += k(r, c);
        }
    }
    return dft2(padded);
}

SpectralOperator::SpectralOperator(int channels, std::vector<ComplexGrid> blocks)
    : channels_(channels), blocks_(std::move(blocks)) {
    if (channels != 1 && channels != 3) throw UsageError("spectral operator must be 1x1 or 3x3");
    if (blocks_.size() != std::size_t(channels) * channels)
        throw UsageError("spectral operator needs channels^2 blocks");
    height_ = blocks_.front().height();
    width_ = blocks_.front().width();
    for (const auto& b : blocks_) {
        if (b.height() != height_ || b.width() != width_ || b.channels() != 1)
            throw UsageError("spectral operator blocks must share one single-channel shape");
    }
}

SpectralOperator SpectralOperator::identity(int height, int width, int channels) {
    std::vector<ComplexGrid> blocks;
    for (int i = 0; i < channels; ++i)
        for (int j = 0; j < channels; ++j)
            blocks.emplace_back(height, width, 1, Complex(i == j ? 1.0 : 0.0));
    return SpectralOperator(channels, std::move(blocks));
}

SpectralOperator SpectralOperator::from_kernel(const Kernel& k, int height, int width) {
    return SpectralOperator(1, {kernel_to_otf(k, height, width)});
}

SpectralOperator SpectralOperator::from_color(const ColorBlurSpec& spec, int height, int width) {
    std::vector<ComplexGrid> blocks;
    for (const auto& row : spec.entries) {
        for (const auto& entry : row) {
            ComplexGrid otf = kernel_to_otf(entry.kernel, height, width);
            for (auto& v : otf.data()) v *= entry.weight;
            blocks.push_back(std::move(otf));
        }
    }
    return SpectralOperator(3, std::move(blocks));
}

bool SpectralOperator::compatible(int height, int width, int channels) const noexcept {
    return height == height_ && width == width_ && (channels_ == 1 || channels_ == channels);
}

void SpectralOperator::check_input(int height, int width, int channels) const {
    if (!compatible(height, width, channels))
        throw UsageError("spectral operator (" + std::to_string(height_) + "x" +
                         std::to_string(width_) + ", " + std::to_string(channels_) +
                         " ch) cannot act on " + std::to_string(height) + "x" +
                         std::to_string(width) + "x" + std::to_string(channels));
}

ComplexGrid SpectralOperator::apply(const ComplexGrid& x) const {
    check_input(x.height(), x.width(), x.channels());
    ComplexGrid out(x.height(), x.width(), x.channels());
    const std::size_t n = x.plane_size();
    if (channels_ == 1) {
        auto lam = blocks_[0].data();
        for (int ch = 0; ch < x.channels(); ++ch) {
            auto src = x.channel(ch);
            auto dst = out.channel(ch);
            for (std::size_t f = 0; f < n; ++f) dst[f] = lam[f] * src[f];
        }
        return out;
    }
    for (int i = 0; i < channels_; ++i) {
        auto dst = out.channel(i);
        for (int j = 0; j < channels_; ++j) {
            auto lam = block(i, j).data();
            auto src = x.channel(j);
            for (std::size_t f = 0; f < n; ++f) dst[f] += lam[f] * src[f];
        }
    }
    return out;
}

ComplexGrid SpectralOperator::apply_adjoint(const ComplexGrid& y) const {
    check_input(y.height(), y.width(), y.channels());
    ComplexGrid out(y.height(), y.width(), y.channels());
    const std::size_t n = y.plane_size();
    if (channels_ == 1) {
        auto lam = blocks_[0].data();
        for (int ch = 0; ch < y.channels(); ++ch) {
            auto src = y.channel(ch);
            auto dst = out.channel(ch);
            for (std::size_t f = 0; f < n; ++f) dst[f] = std::conj(lam[f]) * src[f];
        }
        return out;
    }
    for (int j = 0; j < channels_; ++j) {
        auto dst = out.channel(j);
        for (int i = 0; i < channels_; ++i) {
            auto lam = block(i, j).data();
            auto src = y.channel(i);
            for (std::size_t f = 0; f < n; ++f) dst[f] += std::conj(lam[f]) * src[f];
        }
    }
    return out;
}

PixelGrid SpectralOperator::apply(const PixelGrid& g) const { return idft2(apply(dft2(g))); }

PixelGrid SpectralOperator::apply_adjoint(const PixelGrid& g) const {
    return idft2(apply_adjoint(dft2(g)));
}

ComplexGrid solve_scalar_freq(const SpectralOperator& op, double mu1, double c,
                              const ComplexGrid& rhs) {
    if (op.channels() != 1) throw UsageError("solve_scalar_freq needs a 1x1 operator");
    if (!op.compatible(rhs.height(), rhs.width(), rhs.channels()))
        throw UsageError("solve_scalar_freq: operator and right-hand side differ in shape");
    auto lam = op.block(0, 0).data();
    const std::size_t n = rhs.plane_size();
    std::vector<double> diag(n);
    for (std::size_t f = 0; f < n; ++f) {
        diag[f] = mu1 * std::norm(lam[f]) + c;
        if (!(diag[f] > 0.0) || !std::isfinite(diag[f]))
            throw NumericalError("nonpositive diagonal " + std::to_string(diag[f]) +
                                 " at frequency index " + std::to_string(f));
    }
    ComplexGrid out(rhs.height(), rhs.width(), rhs.channels());
    for (int ch = 0; ch < rhs.channels(); ++ch) {
        auto src = rhs.channel(ch);
        auto dst = out.channel(ch);
        for (std::size_t f = 0; f < n; ++f) dst[f] = src[f] / diag[f];
    }
    return out;
}

namespace {

using Mat3 = std::array<std::array<Complex, 3>, 3>;
using Vec3 = std::array<Complex, 3>;

// Gaussian elimination with partial pivoting; false if a pivot vanishes.
bool solve3_pivoting(Mat3 a, Vec3 b, Vec3& x) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) == 0.0) return false;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (int r = col + 1; r < 3; ++r) {
            const Complex factor = a[r][col] / a[col][col];
            for (int c = col; c < 3; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    for (int r = 2; r >= 0; --r) {
        Complex s = b[r];
        for (int c = r + 1; c < 3; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return true;
}

} // namespace

ComplexGrid solve_block_freq(const SpectralOperator& op, double mu1, double c,
                             const ComplexGrid& rhs) {
    if (op.channels() != 3) throw UsageError("solve_block_freq needs a 3x3 operator");
    if (rhs.channels() != 3 || !op.compatible(rhs.height(), rhs.width(), 3))
        throw UsageError("solve_block_freq: right-hand side must be 3-channel and match the operator");

    const std::size_t n = rhs.plane_size();
    ComplexGrid out(rhs.height(), rhs.width(), 3);
    for (std::size_t f = 0; f < n; ++f) {
        Mat3 lam;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) lam[i][j] = op.block(i, j)[f];

        // M = mu1 * L^H L + c I
        Mat3 m{};
        double scale = 0.0;
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                Complex s = 0.0;
                for (int i = 0; i < 3; ++i) s += std::conj(lam[i][a]) * lam[i][b];
                m[a][b] = mu1 * s + (a == b ? c : 0.0);
                scale = std::max(scale, std::abs(m[a][b]));
            }
        }

        // Sylvester: a Hermitian matrix is positive definite iff its leading
        // principal minors are positive.
        const double minor1 = m[0][0].real();
        const double minor2 = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).real();
        const Complex cof00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
        const Complex cof01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
        const Complex cof02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
        const Complex det = m[0][0] * cof00 + m[0][1] * cof01 + m[0][2] * cof02;
        if (!(minor1 > 0.0) || !(minor2 > 0.0) || !(det.real() > 0.0) || !std::isfinite(scale))
            throw NumericalError("per-frequency system is singular or indefinite at frequency index " +
                                 std::to_string(f));

        const Vec3 b{rhs.channel(0)[f], rhs.channel(1)[f], rhs.channel(2)[f]};
        Vec3 x{};
        const double s3 = std::max(1.0, scale);
        if (std::abs(det) >= 1e-14 * s3 * s3 * s3) {
            // adj(M) / det(M)
            Mat3 adj;
            adj[0][0] = cof00;
            adj[1][0] = cof01;
            adj[2][0] = cof02;
            adj[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
            adj[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
            adj[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
            adj[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
            adj[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
            adj[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            for (int r = 0; r < 3; ++r)
                x[r] = (adj[r][0] * b[0] + adj[r][1] * b[1] + adj[r][2] * b[2]) / det;
        } else if (!solve3_pivoting(m, b, x)) {
            throw NumericalError("zero pivot in per-frequency system at frequency index " +
                                 std::to_string(f));
        }
        for (int ch = 0; ch < 3; ++ch) out.channel(ch)[f] = x[ch];
    }
    return out;
}

} // namespace fracdeblur
