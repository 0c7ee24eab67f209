#pragma once

#include <fstream>
#include <sstream>

#include "bitrec/image.hpp"

namespace bitrec {
namespace io {

namespace detail {

// PNM header tokens separated by whitespace; '#' starts a comment.
inline int pnm_token(std::istream& in, std::size_t& offset) {
    int c;
    while ((c = in.get()) != EOF) {
        ++offset;
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') ++offset;
            if (c != EOF) ++offset;
            continue;
        }
        if (!std::isspace(c)) break;
    }
    if (c == EOF) throw format_error("unexpected end of PNM header", offset);
    std::string tok;
    tok.push_back(static_cast<char>(c));
    while ((c = in.get()) != EOF && !std::isspace(c)) {
        ++offset;
        tok.push_back(static_cast<char>(c));
    }
    if (c != EOF) ++offset;
    int value = 0;
    try {
        value = std::stoi(tok);
    } catch (...) {
        throw format_error("non-numeric PNM header token '" + tok + "'", offset - tok.size());
    }
    return value;
}

} // namespace detail

inline ImageTensor load_pnm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open: " + path);
    std::size_t offset = 0;
    char m0 = 0, m1 = 0;
    f.get(m0).get(m1);
    offset = 2;
    if (m0 != 'P' || (m1 != '5' && m1 != '6'))
        throw format_error("not a binary PGM/PPM (expected P5 or P6 magic)", 0);
    const int channels = (m1 == '6') ? 3 : 1;
    const int width = detail::pnm_token(f, offset);
    const int height = detail::pnm_token(f, offset);
    const int maxval = detail::pnm_token(f, offset);
    if (maxval != 255 && maxval != 65535)
        throw format_error("unsupported PNM maxval " + std::to_string(maxval) +
                           " (need 255 or 65535)", offset);
    const int bits = (maxval == 255) ? 8 : 16;

    ImageTensor img(height, width, channels, bits, bits, ImageRole::full);
    const std::size_t samples = img.size();
    if (bits == 8) {
        std::vector<std::uint8_t> buf(samples);
        f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(samples));
        if (static_cast<std::size_t>(f.gcount()) != samples)
            throw format_error("PNM pixel data truncated", offset + f.gcount());
        for (std::size_t i = 0; i < samples; ++i) img.codes[i] = buf[i];
    } else {
        // 16-bit PNM samples are big-endian.
        std::vector<std::uint8_t> buf(samples * 2);
        f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (static_cast<std::size_t>(f.gcount()) != buf.size())
            throw format_error("PNM pixel data truncated", offset + f.gcount());
        for (std::size_t i = 0; i < samples; ++i)
            img.codes[i] = static_cast<std::uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
    }
    return img;
}

inline void save_pnm(const ImageTensor& img, const std::string& path) {
    if (img.container_bits != 8 && img.container_bits != 16)
        throw invalid_argument("save_pnm: container_bits must be 8 or 16");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for writing: " + path);
    const int maxval = (img.container_bits == 8) ? 255 : 65535;
    f << (img.channels == 3 ? "P6" : "P5") << "\n"
      << img.width << " " << img.height << "\n"
      << maxval << "\n";
    if (img.container_bits == 8) {
        std::vector<std::uint8_t> buf(img.size());
        for (std::size_t i = 0; i < img.size(); ++i)
            buf[i] = static_cast<std::uint8_t>(img.codes[i]);
        f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    } else {
        std::vector<std::uint8_t> buf(img.size() * 2);
        for (std::size_t i = 0; i < img.size(); ++i) {
            buf[2 * i] = static_cast<std::uint8_t>(img.codes[i] >> 8);
            buf[2 * i + 1] = static_cast<std::uint8_t>(img.codes[i] & 0xFF);
        }
        f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
    if (!f) throw io_error("write failed: " + path);
}

} // namespace io
} // namespace bitrec
