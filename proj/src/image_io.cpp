#include "inrc/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include "inrc/common.hpp"

namespace inrc {

namespace {

ImageBuffer from_rgb8(int width, int height, const std::vector<uint8_t>& rgb) {
    ImageBuffer image;
    image.width = width;
    image.height = height;
    image.pixels.resize(rgb.size());
    for (size_t i = 0; i < rgb.size(); ++i) image.pixels[i] = rgb[i] / 255.0;
    return image;
}

std::vector<uint8_t> to_rgb8(const ImageBuffer& image) {
    std::vector<uint8_t> rgb(image.pixels.size());
    for (size_t i = 0; i < image.pixels.size(); ++i) {
        const double v = std::clamp(image.pixels[i], 0.0, 1.0);
        rgb[i] = static_cast<uint8_t>(std::lround(v * 255.0));
    }
    return rgb;
}

bool ppm_space(int c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }
bool ppm_digit(int c) { return c >= '0' && c <= '9'; }

int skip_ppm_space(std::istream& in) {
    int c = in.get();
    while (c == '#' || ppm_space(c)) {
        if (c == '#')
            while (c != '\n' && c != EOF) c = in.get();
        c = in.get();
    }
    return c;
}

int read_ppm_int(std::istream& in) {
    int c = skip_ppm_space(in);
    if (!ppm_digit(c)) throw CorruptDataError("ppm: expected integer");
    int v = 0;
    while (ppm_digit(c)) {
        v = v * 10 + (c - '0');
        if (v > 1 << 24) throw CorruptDataError("ppm: value out of range");
        c = in.get();
    }
    return v;
}

ImageBuffer load_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[2] = {};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '6') throw FormatError("ppm: not a P6 file");
    const int width = read_ppm_int(in);
    const int height = read_ppm_int(in);
    const int maxval = read_ppm_int(in);
    if (width < 1 || height < 1) throw CorruptDataError("ppm: bad dimensions");
    if (maxval != 255) throw UnsupportedError("ppm: only 8-bit maxval 255 supported");
    // read_ppm_int consumed the single whitespace after maxval
    std::vector<uint8_t> rgb(static_cast<size_t>(width) * height * 3);
    in.read(reinterpret_cast<char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (in.gcount() != static_cast<std::streamsize>(rgb.size()))
        throw CorruptDataError("ppm: truncated pixel data");
    return from_rgb8(width, height, rgb);
}

void save_ppm(const std::string& path, const ImageBuffer& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CodecError("ppm: cannot open for writing: " + path);
    out << "P6\n" << image.width << " " << image.height << "\n255\n";
    const std::vector<uint8_t> rgb = to_rgb8(image);
    out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (!out) throw CodecError("ppm: write failed: " + path);
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

ImageBuffer load_png(const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw CodecError("png: cannot open: " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw CodecError("png: out of memory");
    }
    std::vector<uint8_t> rgb;
    std::vector<png_bytep> rows;
    int width = 0, height = 0;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw CorruptDataError("png: failed to decode " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    const png_byte color = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);
    if (png_get_rowbytes(png, info) != static_cast<size_t>(width) * 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw UnsupportedError("png: unexpected channel layout");
    }
    rgb.resize(static_cast<size_t>(width) * height * 3);
    rows.resize(height);
    for (int y = 0; y < height; ++y) rows[y] = rgb.data() + static_cast<size_t>(y) * width * 3;
    png_read_image(png, rows.data());
    png_destroy_read_struct(&png, &info, nullptr);
    return from_rgb8(width, height, rgb);
}

void save_png(const std::string& path, const ImageBuffer& image) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw CodecError("png: cannot open for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw CodecError("png: out of memory");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw CodecError("png: write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::vector<uint8_t> rgb = to_rgb8(image);
    for (int y = 0; y < image.height; ++y)
        png_write_row(png, const_cast<png_bytep>(rgb.data() + static_cast<size_t>(y) * image.width * 3));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

ImageBuffer load_image(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw CodecError("image: cannot open: " + path);
    uint8_t magic[8] = {};
    probe.read(reinterpret_cast<char*>(magic), 8);
    probe.close();
    static const uint8_t png_magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    if (std::memcmp(magic, png_magic, 8) == 0) return load_png(path);
    if (magic[0] == 'P' && magic[1] == '6') return load_ppm(path);
    throw FormatError("image: unsupported format (need PNG or binary PPM): " + path);
}

void save_image(const std::string& path, const ImageBuffer& image) {
    if (image.width < 1 || image.height < 1 ||
        image.pixels.size() != static_cast<size_t>(image.width) * image.height * 3)
        throw std::invalid_argument("save_image: malformed image");
    const bool png = path.size() >= 4 && path.compare(path.size() - 4, 4, ".png") == 0;
    if (png)
        save_png(path, image);
    else
        save_ppm(path, image);
}

}  // namespace inrc
