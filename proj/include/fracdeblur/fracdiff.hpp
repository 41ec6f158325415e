#pragma once

#include "fracdeblur/grid.hpp"

#include <vector>

namespace fracdeblur {

/// Grünwald-Letnikov weights phi_l = (-1)^l * binom(alpha, l), l < taps.
struct FracCoeffs {
    double alpha = 1.0;
    std::vector<double> phi;

    int taps() const noexcept { return int(phi.size()); }
};

/// Two-component field (one pair per pixel and channel).
struct VectorField {
    PixelGrid px; // derivative along the row index i
    PixelGrid py; // derivative along the column index j

    VectorField() = default;
    VectorField(PixelGrid x, PixelGrid y);
    VectorField(int height, int width, int channels)
        : px(height, width, channels), py(height, width, channels) {}
};

/// phi_0 = 1, phi_l = phi_{l-1} * (l - 1 - alpha) / l.
FracCoeffs gl_coefficients(double alpha, int taps);

/// D_x u(i,j) = sum_l phi_l u(i-l, j) and D_y u(i,j) = sum_l phi_l u(i, j-l),
/// indices wrapped periodically. Applied per channel.
VectorField grad_alpha(const PixelGrid& u, const FracCoeffs& c);

/// Transpose of grad_alpha: sum_l phi_l (px(i+l, j) + py(i, j+l)).
PixelGrid grad_alpha_adjoint(const VectorField& f, const FracCoeffs& c);

/// Sum over pixels and channels of |grad_alpha u|.
double ftv_norm(const PixelGrid& u, const FracCoeffs& c);

/// Spectral norm of grad_alpha on an h x w periodic grid. Each component is
/// a circulant filter along one axis, so the squared norm is the sum of the
/// two peak filter gains.
double estimate_grad_norm(const FracCoeffs& c, int height, int width);

} // namespace fracdeblur
