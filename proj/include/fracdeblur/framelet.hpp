#pragma once

#include "fracdeblur/grid.hpp"

#include <array>

namespace fracdeblur {

/// One-level undecimated piecewise-linear B-spline framelet coefficients of
/// a single channel. subband(i, j) filters with mask h_i along the row index
/// (vertical) and h_j along the column index (horizontal), where
///   h0 = [1, 2, 1] / 4,  h1 = sqrt(2)/4 [1, 0, -1],  h2 = [-1, 2, -1] / 4.
struct FrameletCoeffs {
    std::array<PixelGrid, 9> bands;

    PixelGrid& subband(int i, int j) { return bands[std::size_t(3 * i + j)]; }
    const PixelGrid& subband(int i, int j) const { return bands[std::size_t(3 * i + j)]; }

    FrameletCoeffs() = default;
    FrameletCoeffs(int height, int width);
};

/// The three 1-D masks, indexed by offset -1, 0, +1.
const std::array<std::array<double, 3>, 3>& framelet_masks();

/// W u. Periodic, no downsampling.
FrameletCoeffs analysis(const PixelGrid& u);

/// W^T c. Since W^T W = I this inverts analysis exactly.
PixelGrid synthesis(const FrameletCoeffs& c);

double norm1(const FrameletCoeffs& c);
double norm2(const FrameletCoeffs& c);
double inner(const FrameletCoeffs& a, const FrameletCoeffs& b);

} // namespace fracdeblur
