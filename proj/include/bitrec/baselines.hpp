#pragma once

#include "bitrec/image.hpp"

namespace bitrec {
namespace baselines {

namespace detail {

inline void require_recoverable(const ImageTensor& img) {
    if (img.effective_bits >= img.container_bits)
        throw invalid_argument("baseline: image already at full depth, nothing to recover");
}

} // namespace detail

// ZP: keep the zero-padded codes as-is, reinterpret at full depth.
inline ImageTensor zero_pad(const ImageTensor& img) {
    detail::require_recoverable(img);
    ImageTensor out = img;
    out.effective_bits = out.container_bits;
    out.role = ImageRole::full;
    return out;
}

// MIG scalar map: round(c * (2^N - 1)/(2^q - 1)), half away from zero.
inline std::uint16_t ideal_gain_code(std::uint16_t code, int q, int n) {
    const std::uint32_t c = code >> (n - q);
    const std::uint32_t num = c * ((1u << n) - 1u);
    const std::uint32_t den = (1u << q) - 1u;
    return static_cast<std::uint16_t>((2 * num + den) / (2 * den));
}

inline ImageTensor ideal_gain(const ImageTensor& img) {
    detail::require_recoverable(img);
    const int n = img.container_bits;
    const int q = img.effective_bits;
    ImageTensor out = img;
    for (auto& c : out.codes) c = ideal_gain_code(c, q, n);
    out.effective_bits = n;
    out.role = ImageRole::full;
    return out;
}

// BR scalar map: repeat the q-bit pattern left-to-right across the
// N-bit field, truncating the last copy at the low end.
inline std::uint16_t bit_replicate_code(std::uint16_t code, int q, int n) {
    const std::uint32_t c = code >> (n - q);
    std::uint32_t out = 0;
    for (int s = n - q; s > -q; s -= q)
        out |= (s >= 0) ? (c << s) : (c >> -s);
    return static_cast<std::uint16_t>(out);
}

inline ImageTensor bit_replicate(const ImageTensor& img) {
    detail::require_recoverable(img);
    const int n = img.container_bits;
    const int q = img.effective_bits;
    ImageTensor out = img;
    for (auto& c : out.codes) c = bit_replicate_code(c, q, n);
    out.effective_bits = n;
    out.role = ImageRole::full;
    return out;
}

enum class Method { zp, mig, br };

inline ImageTensor run(Method m, const ImageTensor& img) {
    switch (m) {
        case Method::zp: return zero_pad(img);
        case Method::mig: return ideal_gain(img);
        case Method::br: return bit_replicate(img);
    }
    throw invalid_argument("baseline: unknown method");
}

} // namespace baselines
} // namespace bitrec
