#include "fracdeblur/degrade.hpp"

#include "fracdeblur/errors.hpp"
#include "fracdeblur/spectral.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fracdeblur {

namespace {

void normalize(Kernel& k) {
    const double s = k.sum();
    for (double& w : k.weights) w /= s;
}

// Coordinates within 1e-12 of an integer are snapped so that cos(90 deg)
// and friends do not leak mass into a neighbouring column.
double snap(double v) {
    const double r = std::round(v);
    return std::abs(v - r) < 1e-12 ? r : v;
}

std::vector<double> parse_numbers(const std::string& list, const std::string& spec) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("bad number '" + item + "' in kernel spec '" + spec + "'");
        }
    }
    return out;
}

int as_int(double v, const std::string& spec) {
    if (v != std::floor(v)) throw UsageError("kernel spec '" + spec + "' needs an integer size");
    return int(v);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

ColorBlurSpec from_weights(const double (&w)[3][3], const Kernel (&k)[3][3]) {
    ColorBlurSpec spec;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) spec.entries[i][j] = {w[i][j], k[i][j]};
    return spec;
}

} // namespace

Kernel identity_kernel() { return Kernel{}; }

Kernel make_average_kernel(int r1, int r2) {
    if (r1 < 1 || r2 < 1) throw UsageError("average kernel dimensions must be positive");
    const double w = 1.0 / (double(r1) * r2);
    return Kernel{r1, r2, std::vector<double>(std::size_t(r1) * r2, w)};
}

Kernel make_gaussian_kernel(int hsize, double sigma) {
    if (hsize < 1) throw UsageError("gaussian kernel size must be positive");
    if (!(sigma > 0.0)) throw UsageError("gaussian sigma must be positive");
    Kernel k{hsize, hsize, std::vector<double>(std::size_t(hsize) * hsize)};
    const double centre = (hsize - 1) / 2.0;
    for (int r = 0; r < hsize; ++r) {
        for (int c = 0; c < hsize; ++c) {
            const double y = r - centre;
            const double x = c - centre;
            k.weights[std::size_t(r) * hsize + c] = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
        }
    }
    normalize(k);
    return k;
}

Kernel make_motion_kernel(int length, double angle_deg) {
    if (length < 1) throw UsageError("motion kernel length must be at least 1");
    const double theta = angle_deg * std::numbers::pi / 180.0;
    const double half = (length - 1) / 2.0;
    const double dx = snap(std::cos(theta));
    const double dy = snap(std::sin(theta));
    const int sx = int(std::ceil(snap(half * std::abs(dx))));
    const int sy = int(std::ceil(snap(half * std::abs(dy))));

    Kernel k{2 * sy + 1, 2 * sx + 1, std::vector<double>(std::size_t(2 * sy + 1) * (2 * sx + 1))};
    auto splat = [&](int r, int c, double w) {
        if (w <= 0.0 || r < 0 || c < 0 || r >= k.rows || c >= k.cols) return;
        k.weights[std::size_t(r) * k.cols + c] += w;
    };
    for (int s = 0; s < length; ++s) {
        const double t = -half + s;
        // Rows grow downwards, so a counterclockwise angle moves up.
        const double x = snap(sx + t * dx);
        const double y = snap(sy - t * dy);
        const int c0 = int(std::floor(x));
        const int r0 = int(std::floor(y));
        const double fx = x - c0;
        const double fy = y - r0;
        splat(r0, c0, (1 - fy) * (1 - fx));
        splat(r0, c0 + 1, (1 - fy) * fx);
        splat(r0 + 1, c0, fy * (1 - fx));
        splat(r0 + 1, c0 + 1, fy * fx);
    }
    normalize(k);
    return k;
}

Kernel parse_kernel_spec(const std::string& spec) {
    const std::string s = trim(spec);
    if (s == "identity") return identity_kernel();
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw UsageError("unrecognized kernel spec '" + spec + "'");
    const std::string family = s.substr(0, colon);
    const auto args = parse_numbers(s.substr(colon + 1), spec);
    if (args.size() != 2) throw UsageError("kernel spec '" + spec + "' needs two arguments");
    if (family == "gaussian") return make_gaussian_kernel(as_int(args[0], spec), args[1]);
    if (family == "average") return make_average_kernel(as_int(args[0], spec), as_int(args[1], spec));
    if (family == "motion") return make_motion_kernel(as_int(args[0], spec), args[1]);
    throw UsageError("unknown kernel family '" + family + "'");
}

bool is_color_preset(const std::string& name) {
    return name == "lena" || name == "house" || name == "peppers" || name == "plate" ||
           name == "peppers-small";
}

ColorBlurSpec color_preset(const std::string& name) {
    const Kernel id = identity_kernel();
    if (name == "lena") {
        const double w[3][3] = {{0.7, 0.15, 0.15}, {0.1, 0.8, 0.1}, {0.0, 0.2, 0.6}};
        const Kernel k[3][3] = {
            {make_average_kernel(15, 15), make_gaussian_kernel(11, 9), make_gaussian_kernel(31, 13)},
            {make_gaussian_kernel(21, 11), make_average_kernel(17, 17), make_average_kernel(13, 13)},
            {make_motion_kernel(41, 90), make_motion_kernel(21, 45), make_motion_kernel(61, 135)}};
        return from_weights(w, k);
    }
    if (name == "house") {
        const double t = 1.0 / 3.0;
        const double w[3][3] = {{t, 0, 0}, {0, t, 0}, {0, 0, t}};
        const Kernel k[3][3] = {{make_average_kernel(5, 5), id, id},
                                {id, make_average_kernel(7, 7), id},
                                {id, id, make_average_kernel(9, 9)}};
        return from_weights(w, k);
    }
    const double pw[3][3] = {{0.8, 0.1, 0.1}, {0.15, 0.7, 0.15}, {0.2, 0.2, 0.6}};
    if (name == "peppers" || name == "peppers-small") {
        const bool small = name == "peppers-small";
        const Kernel a = small ? make_average_kernel(5, 5) : make_average_kernel(11, 11);
        const Kernel g = small ? make_gaussian_kernel(5, 2) : make_gaussian_kernel(11, 5);
        const Kernel m = small ? make_motion_kernel(5, 135) : make_motion_kernel(21, 135);
        const Kernel k[3][3] = {{a, g, m}, {a, g, m}, {a, g, m}};
        return from_weights(pw, k);
    }
    if (name == "plate") {
        const Kernel m = make_motion_kernel(41, 135);
        const Kernel k[3][3] = {{m, m, m}, {m, m, m}, {m, m, m}};
        return from_weights(pw, k);
    }
    throw UsageError("unknown color preset '" + name + "'");
}

ColorBlurSpec parse_color_blur(const std::string& text) {
    ColorBlurSpec spec;
    std::stringstream lines(text);
    std::string line;
    int row = 0;
    while (std::getline(lines, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (row == 3) throw UsageError("color blur: more than three rows");
        std::stringstream tokens(line);
        std::string tok;
        int col = 0;
        while (std::getline(tokens, tok, ';')) {
            tok = trim(tok);
            const auto star = tok.find('*');
            if (col == 3 || star == std::string::npos)
                throw UsageError("color blur: expected three 'weight*kernel' entries per row");
            double weight = 0.0;
            try {
                weight = std::stod(tok.substr(0, star));
            } catch (const std::exception&) {
                throw UsageError("color blur: bad weight in '" + tok + "'");
            }
            spec.entries[row][col] = {weight, parse_kernel_spec(tok.substr(star + 1))};
            ++col;
        }
        if (col != 3) throw UsageError("color blur: expected three entries per row");
        ++row;
    }
    if (row != 3) throw UsageError("color blur: expected three rows");
    return spec;
}

ColorBlurSpec read_color_blur_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open color kernel file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_color_blur(ss.str());
}

PixelGrid blur_gray(const PixelGrid& u, const Kernel& k) {
    if (u.channels() != 1) throw UsageError("blur_gray expects a single-channel image");
    return SpectralOperator::from_kernel(k, u.height(), u.width()).apply(u);
}

PixelGrid blur_color(const PixelGrid& u, const ColorBlurSpec& spec) {
    if (u.channels() != 3) throw UsageError("blur_color expects a three-channel image");
    return SpectralOperator::from_color(spec, u.height(), u.width()).apply(u);
}

std::string to_string(NoiseKind kind) {
    return kind == NoiseKind::SaltPepper ? "sp" : "rv";
}

std::string to_string(const NoiseSpec& spec) {
    std::ostringstream ss;
    ss << to_string(spec.kind) << ':' << spec.density;
    return ss.str();
}

NoiseSpec parse_noise_spec(const std::string& text) {
    const std::string s = trim(text);
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw UsageError("noise spec must look like sp:0.1 or rv:0.3");
    NoiseSpec spec;
    const std::string kind = s.substr(0, colon);
    if (kind == "sp")
        spec.kind = NoiseKind::SaltPepper;
    else if (kind == "rv")
        spec.kind = NoiseKind::RandomValued;
    else
        throw UsageError("unknown noise kind '" + kind + "'");
    try {
        std::size_t used = 0;
        spec.density = std::stod(s.substr(colon + 1), &used);
        if (used != s.size() - colon - 1) throw std::invalid_argument(s);
    } catch (const std::exception&) {
        throw UsageError("bad noise density in '" + text + "'");
    }
    if (!(spec.density >= 0.0 && spec.density <= 1.0))
        throw UsageError("noise density must lie in [0,1]");
    return spec;
}

std::uint64_t keyed_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ stream) ^ counter);
}

PixelGrid add_impulse_noise(const PixelGrid& u, const NoiseSpec& spec) {
    if (!(spec.density >= 0.0 && spec.density <= 1.0))
        throw UsageError("noise density must lie in [0,1]");
    auto uniform = [&](int ch, int slot, std::size_t pixel) {
        const std::uint64_t h = keyed_hash(spec.seed, std::uint64_t(ch) * 2 + slot, pixel);
        return double(h >> 11) * 0x1.0p-53;
    };
    PixelGrid out = u;
    for (int ch = 0; ch < u.channels(); ++ch) {
        auto plane = out.channel(ch);
        for (std::size_t i = 0; i < plane.size(); ++i) {
            if (!(uniform(ch, 0, i) < spec.density)) continue;
            const double v = uniform(ch, 1, i);
            plane[i] = spec.kind == NoiseKind::SaltPepper ? (v < 0.5 ? 0.0 : 1.0) : v;
        }
    }
    return out;
}

} // namespace fracdeblur
