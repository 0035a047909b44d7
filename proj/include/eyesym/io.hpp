#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <png.h>

#include "eyesym/image.hpp"

namespace eyesym {

namespace detail {

/// Color to gray by fixed luma weights: (0.299 R + 0.587 G + 0.114 B) / 255.
inline double luma8(unsigned r, unsigned g, unsigned b) {
    return (0.299 * r + 0.587 * g + 0.114 * b) / 255.0;
}

inline GrayImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open image: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5" && magic != "P2")
        throw IoError("unsupported PGM magic in " + path);
    auto next_token = [&in, &path]() {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
        throw IoError("truncated PGM header: " + path);
    };
    const int w = std::stoi(next_token());
    const int h = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
        throw IoError("bad PGM header in " + path);

    GrayImage img(w, h);
    if (magic == "P2") {
        for (double& v : img.data()) {
            long raw = 0;
            if (!(in >> raw))
                throw IoError("truncated PGM data: " + path);
            v = static_cast<double>(raw) / maxval;
        }
        return img;
    }
    in.get(); // single whitespace byte after maxval
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> row(static_cast<std::size_t>(w) * bytes);
    for (int y = 0; y < h; ++y) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
        if (!in)
            throw IoError("truncated PGM data: " + path);
        for (int x = 0; x < w; ++x) {
            const unsigned raw = bytes == 1 ? row[x]
                                            : (unsigned(row[2 * x]) << 8) | row[2 * x + 1];
            img.at(x, y) = static_cast<double>(raw) / maxval;
        }
    }
    return img;
}

inline GrayImage load_png(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp)
        throw IoError("cannot open image: " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("libpng initialization failed");
    }
    png_uint_32 w = 0, h = 0;
    std::vector<unsigned char> pixels;
    std::vector<png_bytep> rows;
    int channels = 0;
    bool failed = false;
    if (setjmp(png_jmpbuf(png))) {
        failed = true;
    } else {
        png_init_io(png, fp);
        png_read_info(png, info);
        w = png_get_image_width(png, info);
        h = png_get_image_height(png, info);
        const int color = png_get_color_type(png, info);
        const int depth = png_get_bit_depth(png, info);
        if (color == PNG_COLOR_TYPE_PALETTE)
            png_set_palette_to_rgb(png);
        if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
            png_set_expand_gray_1_2_4_to_8(png);
        if (depth == 16)
            png_set_strip_16(png);
        if (color & PNG_COLOR_MASK_ALPHA)
            png_set_strip_alpha(png);
        if (png_get_valid(png, info, PNG_INFO_tRNS)) {
            png_set_tRNS_to_alpha(png);
            png_set_strip_alpha(png);
        }
        png_read_update_info(png, info);
        channels = png_get_channels(png, info);
        pixels.resize(static_cast<std::size_t>(w) * h * channels);
        rows.resize(h);
        for (png_uint_32 y = 0; y < h; ++y)
            rows[y] = pixels.data() + static_cast<std::size_t>(y) * w * channels;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    if (failed)
        throw IoError("failed to decode PNG: " + path);
    if (channels != 1 && channels != 3)
        throw IoError("unsupported PNG layout in " + path);

    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    for (png_uint_32 y = 0; y < h; ++y)
        for (png_uint_32 x = 0; x < w; ++x) {
            const unsigned char* px = pixels.data() + (static_cast<std::size_t>(y) * w + x) * channels;
            img.at(static_cast<int>(x), static_cast<int>(y)) =
                channels == 1 ? px[0] / 255.0 : luma8(px[0], px[1], px[2]);
        }
    return img;
}

} // namespace detail

/// Loads an 8-bit grayscale (or color, converted by fixed luma weights)
/// PNG or PGM raster, normalizing intensities to [0, 1].
inline GrayImage load_gray(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe)
        throw IoError("cannot open image: " + path);
    unsigned char sig[2] = {0, 0};
    probe.read(reinterpret_cast<char*>(sig), 2);
    probe.close();
    if (sig[0] == 'P' && (sig[1] == '5' || sig[1] == '2'))
        return detail::load_pgm(path);
    if (sig[0] == 0x89 && sig[1] == 'P')
        return detail::load_png(path);
    throw IoError("unrecognized image format: " + path);
}

/// Writes an 8-bit binary PGM (values rounded from [0, 1]).
inline void save_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write image: " + path);
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(img.width()));
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const double v = std::clamp(img.at(x, y), 0.0, 1.0);
            row[x] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out)
        throw IoError("failed writing image: " + path);
}

} // namespace eyesym
