#include "fracdeblur/fracdiff.hpp"

#include "fracdeblur/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace fracdeblur {

VectorField::VectorField(PixelGrid x, PixelGrid y) : px(std::move(x)), py(std::move(y)) {
    require_same_shape(px, py, "VectorField");
}

FracCoeffs gl_coefficients(double alpha, int taps) {
    if (!(alpha > 0.0)) throw UsageError("fractional order must be positive");
    if (taps < 2) throw UsageError("at least two Grünwald-Letnikov taps are required");
    FracCoeffs c;
    c.alpha = alpha;
    c.phi.resize(taps);
    c.phi[0] = 1.0;
    for (int l = 1; l < taps; ++l) c.phi[l] = c.phi[l - 1] * (l - 1 - alpha) / l;
    return c;
}

namespace {

void check_taps(const PixelGrid& g, const FracCoeffs& c) {
    if (c.taps() > std::min(g.height(), g.width()))
        throw UsageError(std::to_string(c.taps()) + " taps do not fit a " +
                         std::to_string(g.height()) + "x" + std::to_string(g.width()) + " image");
}

} // namespace

VectorField grad_alpha(const PixelGrid& u, const FracCoeffs& c) {
    check_taps(u, c);
    const int h = u.height();
    const int w = u.width();
    VectorField out(h, w, u.channels());
    for (int ch = 0; ch < u.channels(); ++ch) {
        for (int i = 0; i < h; ++i) {
            for (int j = 0; j < w; ++j) {
                double dx = 0.0;
                double dy = 0.0;
                for (int l = 0; l < c.taps(); ++l) {
                    const int ii = i - l < 0 ? i - l + h : i - l;
                    const int jj = j - l < 0 ? j - l + w : j - l;
                    dx += c.phi[l] * u(ii, j, ch);
                    dy += c.phi[l] * u(i, jj, ch);
                }
                out.px(i, j, ch) = dx;
                out.py(i, j, ch) = dy;
            }
        }
    }
    return out;
}

PixelGrid grad_alpha_adjoint(const VectorField& f, const FracCoeffs& c) {
    require_same_shape(f.px, f.py, "grad_alpha_adjoint");
    check_taps(f.px, c);
    const int h = f.px.height();
    const int w = f.px.width();
    PixelGrid out(h, w, f.px.channels());
    for (int ch = 0; ch < f.px.channels(); ++ch) {
        for (int i = 0; i < h; ++i) {
            for (int j = 0; j < w; ++j) {
                double s = 0.0;
                for (int l = 0; l < c.taps(); ++l) {
                    const int ii = i + l >= h ? i + l - h : i + l;
                    const int jj = j + l >= w ? j + l - w : j + l;
                    s += c.phi[l] * (f.px(ii, j, ch) + f.py(i, jj, ch));
                }
                out(i, j, ch) = s;
            }
        }
    }
    return out;
}

double ftv_norm(const PixelGrid& u, const FracCoeffs& c) {
    const VectorField g = grad_alpha(u, c);
    double s = 0.0;
    auto x = g.px.data();
    auto y = g.py.data();
    for (std::size_t i = 0; i < x.size(); ++i) s += std::hypot(x[i], y[i]);
    return s;
}

namespace {

// max_k |sum_l phi_l exp(-2 pi i k l / n)|^2 with taps wrapped onto n bins.
double peak_gain_squared(const std::vector<double>& phi, int n) {
    std::vector<double> folded(std::size_t(n), 0.0);
    for (std::size_t l = 0; l < phi.size(); ++l) folded[l % std::size_t(n)] += phi[l];
    double peak = 0.0;
    for (int k = 0; k < n; ++k) {
        std::complex<double> s = 0.0;
        for (int l = 0; l < n; ++l) s += folded[std::size_t(l)] * std::polar(1.0, -2.0 * std::numbers::pi * k * l / n);
        peak = std::max(peak, std::norm(s));
    }
    return peak;
}

} // namespace

double estimate_grad_norm(const FracCoeffs& c, int height, int width) {
    return std::sqrt(peak_gain_squared(c.phi, height) + peak_gain_squared(c.phi, width));
}

} // namespace fracdeblur
