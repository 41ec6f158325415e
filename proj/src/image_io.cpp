#include "fracdeblur/image_io.hpp"

#include "fracdeblur/errors.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <vector>

namespace fracdeblur {

namespace {

std::string extension(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return {};
    std::string ext = path.substr(dot + 1);
    std::ranges::transform(ext, ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    return ext;
}

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

unsigned quantize(double v, int max_value) {
    return unsigned(std::lround(std::clamp(v, 0.0, 1.0) * max_value));
}

// --- PNM -------------------------------------------------------------------

std::string next_token(std::istream& in) {
    std::string tok;
    char c;
    while (in.get(c)) {
        if (c == '#') {
            std::string skip;
            std::getline(in, skip);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(c);
    }
    return tok;
}

int parse_int(const std::string& tok, const std::string& path) {
    try {
        return std::stoi(tok);
    } catch (const std::exception&) {
        throw IoError("malformed PNM header in " + path);
    }
}

Image read_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    const std::string magic = next_token(in);
    if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6")
        throw IoError(path + ": unsupported PNM type '" + magic + "'");
    const int width = parse_int(next_token(in), path);
    const int height = parse_int(next_token(in), path);
    const int maxval = parse_int(next_token(in), path);
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535)
        throw IoError(path + ": bad PNM dimensions or maxval");
    const int channels = (magic == "P3" || magic == "P6") ? 3 : 1;
    const bool ascii = magic == "P2" || magic == "P3";

    Image img;
    img.max_value = maxval;
    img.pixels = PixelGrid(height, width, channels);
    const std::size_t count = std::size_t(height) * width * channels;
    std::vector<unsigned> raw(count);
    if (ascii) {
        for (auto& v : raw) {
            const std::string tok = next_token(in);
            if (tok.empty()) throw IoError(path + ": truncated pixel data");
            v = unsigned(parse_int(tok, path));
        }
    } else {
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> buf(count * bytes);
        if (!in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size())))
            throw IoError(path + ": truncated pixel data");
        for (std::size_t i = 0; i < count; ++i)
            raw[i] = bytes == 2 ? (unsigned(buf[2 * i]) << 8) | buf[2 * i + 1] : buf[i];
    }
    // Interleaved file order -> channel-planar grid.
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            for (int ch = 0; ch < channels; ++ch)
                img.pixels(r, c, ch) =
                    double(raw[(std::size_t(r) * width + c) * channels + ch]) / maxval;
    return img;
}

void write_pnm(const std::string& path, const PixelGrid& g, int max_value) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << (g.channels() == 3 ? "P3" : "P2") << '\n'
        << g.width() << ' ' << g.height() << '\n'
        << max_value << '\n';
    for (int r = 0; r < g.height(); ++r) {
        for (int c = 0; c < g.width(); ++c)
            for (int ch = 0; ch < g.channels(); ++ch)
                out << ((c || ch) ? " " : "") << quantize(g(r, c, ch), max_value);
        out << '\n';
    }
    if (!out) throw IoError("error writing " + path);
}

// --- PNG -------------------------------------------------------------------

Image read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng initialisation failed");
    }
    std::vector<png_bytep> rows;
    std::vector<png_byte> buffer;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path + ": invalid PNG");
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (bit_depth == 16) png_set_swap(png); // host-order 16-bit samples (little endian)
    png_read_update_info(png, info);

    const int width = int(png_get_image_width(png, info));
    const int height = int(png_get_image_height(png, info));
    const int depth = png_get_bit_depth(png, info);
    const int channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path + ": unsupported PNG channel layout");
    }
    const std::size_t stride = png_get_rowbytes(png, info);
    buffer.resize(stride * height);
    rows.resize(std::size_t(height));
    for (int r = 0; r < height; ++r) rows[std::size_t(r)] = buffer.data() + stride * r;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Image img;
    img.max_value = depth == 16 ? 65535 : 255;
    img.pixels = PixelGrid(height, width, channels);
    for (int r = 0; r < height; ++r) {
        const png_byte* row = rows[std::size_t(r)];
        for (int c = 0; c < width; ++c)
            for (int ch = 0; ch < channels; ++ch) {
                const std::size_t k = std::size_t(c) * channels + ch;
                unsigned v = depth == 16 ? unsigned(row[2 * k]) | (unsigned(row[2 * k + 1]) << 8)
                                         : unsigned(row[k]);
                img.pixels(r, c, ch) = double(v) / img.max_value;
            }
    }
    return img;
}

void write_png(const std::string& path, const PixelGrid& g, int max_value) {
    const int depth = max_value > 255 ? 16 : 8;
    const int maxv = depth == 16 ? 65535 : 255;
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng initialisation failed");
    }
    const int channels = g.channels();
    const std::size_t stride = std::size_t(g.width()) * channels * (depth / 8);
    std::vector<png_byte> buffer(stride * g.height());
    std::vector<png_bytep> rows(std::size_t(g.height()));
    for (int r = 0; r < g.height(); ++r) {
        png_byte* row = buffer.data() + stride * r;
        rows[std::size_t(r)] = row;
        for (int c = 0; c < g.width(); ++c)
            for (int ch = 0; ch < channels; ++ch) {
                const std::size_t k = std::size_t(c) * channels + ch;
                const unsigned v = quantize(g(r, c, ch), maxv);
                if (depth == 16) {
                    row[2 * k] = png_byte(v >> 8);
                    row[2 * k + 1] = png_byte(v & 0xff);
                } else {
                    row[k] = png_byte(v);
                }
            }
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("error writing " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, png_uint_32(g.width()), png_uint_32(g.height()), depth,
                 channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace

Image read_image(const std::string& path) {
    const std::string ext = extension(path);
    if (ext == "png") return read_png(path);
    if (ext == "pgm" || ext == "ppm" || ext == "pnm") return read_pnm(path);
    throw IoError("unsupported image extension for " + path);
}

void write_image(const std::string& path, const PixelGrid& pixels, int max_value) {
    const std::string ext = extension(path);
    if (ext == "png")
        write_png(path, pixels, max_value);
    else if (ext == "pgm" || ext == "ppm" || ext == "pnm")
        write_pnm(path, pixels, max_value);
    else
        throw IoError("unsupported image extension for " + path);
}

} // namespace fracdeblur
