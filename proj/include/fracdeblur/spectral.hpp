#pragma once

#include "fracdeblur/grid.hpp"
#include "fracdeblur/kernel.hpp"

#include <vector>

namespace fracdeblur {

/// Unnormalized forward 2-D DFT of every channel.
ComplexGrid dft2(const PixelGrid& g);
ComplexGrid dft2(const ComplexGrid& g);

/// Inverse of dft2 (includes the 1/(H*W) factor); keeps the real part.
PixelGrid idft2(const ComplexGrid& spectrum);
/// Inverse of dft2 keeping the complex result.
ComplexGrid idft2_complex(const ComplexGrid& spectrum);

/// Eigenvalues of periodic convolution by `k` on an h x w grid.
ComplexGrid kernel_to_otf(const Kernel& k, int h, int w);

/// Per-frequency representation of a block-circulant blur. A C x C array of
/// single-channel eigenvalue grids; block(i, j) maps input channel j to
/// output channel i. A 1 x 1 operator acts on every channel of a
/// multi-channel image independently.
class SpectralOperator {
public:
    SpectralOperator() = default;
    SpectralOperator(int channels, std::vector<ComplexGrid> blocks);

    static SpectralOperator identity(int height, int width, int channels = 1);
    static SpectralOperator from_kernel(const Kernel& k, int height, int width);
    static SpectralOperator from_color(const ColorBlurSpec& spec, int height, int width);

    int channels() const noexcept { return channels_; }
    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }

    const ComplexGrid& block(int i, int j) const { return blocks_[std::size_t(i) * channels_ + j]; }

    /// True if the operator can act on an image of this shape.
    bool compatible(int height, int width, int channels) const noexcept;

    ComplexGrid apply(const ComplexGrid& spectrum) const;
    /// Conjugate-transposed blocks, i.e. the transpose of the real operator.
    ComplexGrid apply_adjoint(const ComplexGrid& spectrum) const;

    PixelGrid apply(const PixelGrid& g) const;
    PixelGrid apply_adjoint(const PixelGrid& g) const;

private:
    void check_input(int height, int width, int channels) const;

    int channels_ = 0;
    int height_ = 0;
    int width_ = 0;
    std::vector<ComplexGrid> blocks_;
};

/// Solves (mu1 |L_i|^2 + c) x_i = rhs_i at every frequency i, for each channel
/// of `rhs`. Requires a 1 x 1 operator.
ComplexGrid solve_scalar_freq(const SpectralOperator& op, double mu1, double c,
                              const ComplexGrid& rhs);

/// Solves (mu1 L_i^H L_i + c I) x_i = rhs_i with a 3 x 3 block per frequency.
ComplexGrid solve_block_freq(const SpectralOperator& op, double mu1, double c,
                             const ComplexGrid& rhs);

} // namespace fracdeblur
