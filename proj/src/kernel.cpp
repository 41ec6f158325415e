#include "fracdeblur/kernel.hpp"

#include "fracdeblur/errors.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>

namespace fracdeblur {

double Kernel::sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

Kernel read_kernel(std::istream& in) {
    Kernel k;
    if (!(in >> k.rows >> k.cols) || k.rows <= 0 || k.cols <= 0)
        throw UsageError("kernel file: expected positive \"rows cols\" header");
    k.weights.resize(std::size_t(k.rows) * k.cols);
    for (double& w : k.weights) {
        if (!(in >> w)) throw UsageError("kernel file: too few weights");
    }
    return k;
}

Kernel read_kernel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open kernel file " + path);
    return read_kernel(in);
}

void write_kernel(std::ostream& out, const Kernel& k) {
    out << k.rows << ' ' << k.cols << '\n' << std::setprecision(17);
    for (int r = 0; r < k.rows; ++r) {
        for (int c = 0; c < k.cols; ++c) out << (c ? " " : "") << k(r, c);
        out << '\n';
    }
}

} // namespace fracdeblur
