#pragma once

// Helpers shared by the unit tests. Every oracle here is written from the
// textbook definition with plain loops, independent of the library code.

#include "fracdeblur/grid.hpp"
#include "fracdeblur/kernel.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace testing {

using fracdeblur::ComplexGrid;
using fracdeblur::Kernel;
using fracdeblur::PixelGrid;

inline PixelGrid random_grid(int h, int w, int c, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    PixelGrid g(h, w, c);
    for (auto& v : g.data()) v = dist(rng);
    return g;
}

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

inline double max_abs_diff(const PixelGrid& a, const PixelGrid& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// O(n^2 m^2) forward DFT: X(k,l) = sum x(r,c) exp(-2 pi i (kr/H + lc/W)).
inline ComplexGrid naive_dft(const PixelGrid& x) {
    const int H = x.height(), W = x.width();
    ComplexGrid out(H, W, x.channels());
    for (int ch = 0; ch < x.channels(); ++ch)
        for (int k = 0; k < H; ++k)
            for (int l = 0; l < W; ++l) {
                std::complex<double> s = 0.0;
                for (int r = 0; r < H; ++r)
                    for (int c = 0; c < W; ++c) {
                        const double ang = -2.0 * std::numbers::pi * (double(k) * r / H + double(l) * c / W);
                        s += x(r, c, ch) * std::complex<double>(std::cos(ang), std::sin(ang));
                    }
                out(k, l, ch) = s;
            }
    return out;
}

/// Periodic convolution with the kernel centre at (rows/2, cols/2):
/// out(i,j) = sum k(r,c) u(i - (r - rows/2), j - (c - cols/2)).
inline PixelGrid direct_conv(const PixelGrid& u, const Kernel& k, int ch = 0) {
    const int H = u.height(), W = u.width();
    PixelGrid out(H, W, 1);
    const int cr = k.rows / 2, cc = k.cols / 2;
    for (int i = 0; i < H; ++i)
        for (int j = 0; j < W; ++j) {
            double s = 0.0;
            for (int r = 0; r < k.rows; ++r)
                for (int c = 0; c < k.cols; ++c) s += k(r, c) * u(wrap(i - (r - cr), H), wrap(j - (c - cc), W), ch);
            out(i, j) = s;
        }
    return out;
}

inline Kernel random_kernel(int rows, int cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Kernel k{rows, cols, std::vector<double>(std::size_t(rows) * cols)};
    double total = 0.0;
    for (auto& w : k.weights) total += (w = dist(rng));
    for (auto& w : k.weights) w /= total;
    return k;
}

// (-1)^l Gamma(a+1) / (Gamma(l+1) Gamma(a+1-l)) via lgamma with explicit signs.
inline double gamma_coefficient(double a, int l) {
    const double arg = a + 1.0 - l;
    if (arg <= 0.0 && arg == std::floor(arg)) return 0.0; // pole of Gamma(a+1-l)
    const double mag = std::exp(std::lgamma(a + 1.0) - std::lgamma(l + 1.0) - std::lgamma(arg));
    const double gsign = std::tgamma(arg) < 0.0 ? -1.0 : 1.0;
    return (l % 2 ? -1.0 : 1.0) * gsign * mag;
}

// Minimizes a|m| + (mu/2)(m - x)^2 over a 1e-4 grid on [x - 3, x + 3].
inline std::pair<double, double> scan_prox(double x, double a, double mu) {
    double best = INFINITY, arg = 0.0;
    for (long k = -30000; k <= 30000; ++k) {
        const double m = std::round(x * 1e4) * 1e-4 + k * 1e-4;
        const double v = a * std::abs(m) + 0.5 * mu * (m - x) * (m - x);
        if (v < best) best = v, arg = m;
    }
    return {arg, best};
}

// Independent isotropic TV prox for alpha = 1:
//   argmin_m weight * sum_i |(D m)_i| + 1/2 |m - z|^2,
// D the periodic backward difference in both directions. Solved through the
// dual min_{|q_i| <= 1} 1/2 |z - weight D^T q|^2 with accelerated projected
// gradient, then m = z - weight D^T q.
inline PixelGrid tv_prox_oracle(const PixelGrid& z, double weight, int iterations) {
    const int H = z.height(), W = z.width();
    auto D = [&](const PixelGrid& m, PixelGrid& dx, PixelGrid& dy) {
        for (int i = 0; i < H; ++i)
            for (int j = 0; j < W; ++j) {
                dx(i, j) = m(i, j) - m(wrap(i - 1, H), j);
                dy(i, j) = m(i, j) - m(i, wrap(j - 1, W));
            }
    };
    auto Dt = [&](const PixelGrid& qx, const PixelGrid& qy) {
        PixelGrid out(H, W);
        for (int i = 0; i < H; ++i)
            for (int j = 0; j < W; ++j)
                out(i, j) = qx(i, j) - qx(wrap(i + 1, H), j) + qy(i, j) - qy(i, wrap(j + 1, W));
        return out;
    };
    PixelGrid qx(H, W), qy(H, W), yx(H, W), yy(H, W), gx(H, W), gy(H, W);
    const double step = 1.0 / (8.0 * weight * weight); // |D|^2 <= 8
    double t = 1.0;
    for (int k = 0; k < iterations; ++k) {
        const PixelGrid m = fracdeblur::axpy(-weight, Dt(yx, yy), z);
        D(m, gx, gy);
        PixelGrid nx(H, W), ny(H, W);
        for (std::size_t i = 0; i < qx.size(); ++i) {
            const double ax = yx[i] + step * weight * gx[i];
            const double ay = yy[i] + step * weight * gy[i];
            const double n = std::max(1.0, std::hypot(ax, ay));
            nx[i] = ax / n;
            ny[i] = ay / n;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double mom = (t - 1.0) / t_next;
        for (std::size_t i = 0; i < qx.size(); ++i) {
            yx[i] = nx[i] + mom * (nx[i] - qx[i]);
            yy[i] = ny[i] + mom * (ny[i] - qy[i]);
        }
        qx = nx;
        qy = ny;
        t = t_next;
    }
    return fracdeblur::axpy(-weight, Dt(qx, qy), z);
}

} // namespace testing
