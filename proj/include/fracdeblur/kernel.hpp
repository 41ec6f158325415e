#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace fracdeblur {

/// Point-spread function. Centre tap is (rows/2, cols/2), rounded down.
struct Kernel {
    int rows = 1;
    int cols = 1;
    std::vector<double> weights{1.0}; // row-major

    double operator()(int r, int c) const { return weights[std::size_t(r) * cols + c]; }
    double sum() const;

    friend bool operator==(const Kernel&, const Kernel&) = default;
};

/// One entry of a cross-channel blur: weight * (kernel conv channel).
struct ColorBlurEntry {
    double weight = 0.0;
    Kernel kernel;
};

/// entries[i][j] maps input channel j into output channel i.
struct ColorBlurSpec {
    std::array<std::array<ColorBlurEntry, 3>, 3> entries;
};

/// Text format: "rows cols" then rows*cols ASCII weights, row-major.
Kernel read_kernel(std::istream& in);
Kernel read_kernel_file(const std::string& path);
void write_kernel(std::ostream& out, const Kernel& k);

} // namespace fracdeblur
