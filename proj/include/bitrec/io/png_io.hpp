#pragma once

#include <csetjmp>
#include <cstdio>
#include <memory>

#include <png.h>

#include "bitrec/image.hpp"

namespace bitrec {
namespace io {

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] inline void png_error_fn(png_structp png, png_const_charp msg) {
    std::longjmp(png_jmpbuf(png), 1);
    (void)msg;
}

inline void png_warn_fn(png_structp, png_const_charp) {}

} // namespace detail

inline ImageTensor load_png(const std::string& path) {
    detail::FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw io_error("cannot open: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                             detail::png_error_fn, detail::png_warn_fn);
    if (!png) throw io_error("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw io_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw format_error("libpng failed to decode " + path);
    }

    png_init_io(png, f.get());
    png_read_info(png, info);

    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    if (bit_depth != 8 && bit_depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw format_error("unsupported PNG bit depth " + std::to_string(bit_depth) +
                           " (need 8 or 16)");
    }
    if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw format_error("unsupported PNG color type " + std::to_string(color_type) +
                           " (need grayscale or RGB without alpha)");
    }

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    const int channels = (color_type == PNG_COLOR_TYPE_RGB) ? 3 : 1;

    ImageTensor img(height, width, channels, bit_depth, bit_depth, ImageRole::full);
    const std::size_t row_bytes = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
    std::vector<std::uint8_t> data(row_bytes * height);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = data.data() + row_bytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (bit_depth == 8) {
        for (std::size_t i = 0; i < img.size(); ++i) img.codes[i] = data[i];
    } else {
        // PNG 16-bit samples are big-endian.
        for (std::size_t i = 0; i < img.size(); ++i)
            img.codes[i] = static_cast<std::uint16_t>((data[2 * i] << 8) | data[2 * i + 1]);
    }
    return img;
}

inline void save_png(const ImageTensor& img, const std::string& path) {
    if (img.container_bits != 8 && img.container_bits != 16)
        throw invalid_argument("save_png: container_bits must be 8 or 16");
    detail::FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw io_error("cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              detail::png_error_fn, detail::png_warn_fn);
    if (!png) throw io_error("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw io_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw io_error("libpng failed to encode " + path);
    }

    png_init_io(png, f.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), img.container_bits,
                 img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const std::size_t row_bytes =
        static_cast<std::size_t>(img.width) * img.channels * (img.container_bits / 8);
    std::vector<std::uint8_t> data(row_bytes * img.height);
    if (img.container_bits == 8) {
        for (std::size_t i = 0; i < img.size(); ++i)
            data[i] = static_cast<std::uint8_t>(img.codes[i]);
    } else {
        for (std::size_t i = 0; i < img.size(); ++i) {
            data[2 * i] = static_cast<std::uint8_t>(img.codes[i] >> 8);
            data[2 * i + 1] = static_cast<std::uint8_t>(img.codes[i] & 0xFF);
        }
    }
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y) rows[y] = data.data() + row_bytes * y;
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace io
} // namespace bitrec
