#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bitrec/errors.hpp"

namespace bitrec {

enum class ImageRole { full, quantized, residual };

// Integer raster. Codes live in a 16-bit container regardless of the
// nominal depth N; container_bits/effective_bits are metadata.
//   full      : effective_bits == container_bits
//   quantized : low (N - q) bits of every code are zero
//   residual  : every code < 2^(N - q), effective_bits stores N - q
struct ImageTensor {
    int height = 0;
    int width = 0;
    int channels = 1; // 1 or 3
    int container_bits = 8;  // N in [2,16]
    int effective_bits = 8;  // q in [1,N]
    ImageRole role = ImageRole::full;
    std::vector<std::uint16_t> codes; // row-major, channel-interleaved

    ImageTensor() = default;
    ImageTensor(int h, int w, int c, int n_bits, int eff_bits, ImageRole r)
        : height(h), width(w), channels(c), container_bits(n_bits),
          effective_bits(eff_bits), role(r),
          codes(static_cast<std::size_t>(h) * w * c, 0) {
        if (h <= 0 || w <= 0) throw invalid_argument("ImageTensor: non-positive dimensions");
        if (c != 1 && c != 3) throw invalid_argument("ImageTensor: channels must be 1 or 3");
        if (n_bits < 2 || n_bits > 16) throw invalid_argument("ImageTensor: container_bits out of [2,16]");
        if (eff_bits < 0 || eff_bits > n_bits) throw invalid_argument("ImageTensor: effective_bits out of range");
    }

    std::size_t size() const { return codes.size(); }

    std::uint16_t& at(int y, int x, int c) {
        return codes[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint16_t at(int y, int x, int c) const {
        return codes[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    bool same_shape(const ImageTensor& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

// One bit position across all pixels. Contributes 2^plane_index per set bit.
struct Bitplane {
    int height = 0;
    int width = 0;
    int channels = 1;
    int plane_index = 0;
    std::vector<std::uint8_t> bits; // entries in {0,1}

    Bitplane() = default;
    Bitplane(int h, int w, int c, int p)
        : height(h), width(w), channels(c), plane_index(p),
          bits(static_cast<std::size_t>(h) * w * c, 0) {}

    std::size_t size() const { return bits.size(); }

    bool same_shape(const ImageTensor& img) const {
        return height == img.height && width == img.width && channels == img.channels;
    }
};

// The (q -> N) recovery schedule: plane indices N-(q+1) .. 0, most
// significant lost plane first.
struct RecoveryRange {
    int source_bits = 0; // q
    int target_bits = 0; // N
    std::vector<int> plane_indices;

    RecoveryRange() = default;
    RecoveryRange(int q, int n) : source_bits(q), target_bits(n) {
        if (!(1 <= q && q < n && n <= 16))
            throw invalid_argument("RecoveryRange: need 1 <= q < N <= 16");
        for (int p = n - (q + 1); p >= 0; --p) plane_indices.push_back(p);
    }

    int steps() const { return target_bits - source_bits; }
};

// I_q = floor(O / 2^(N-q)) * 2^(N-q). Zeros the low N-q bits.
inline ImageTensor quantize(const ImageTensor& img, int q) {
    const int n = img.container_bits;
    if (q < 1 || q > n) throw invalid_argument("quantize: q out of [1,N]");
    if (img.role == ImageRole::residual)
        throw invalid_argument("quantize: residual images cannot be quantized");
    if (img.role == ImageRole::quantized && img.effective_bits < q)
        throw invalid_argument("quantize: input has fewer effective bits than requested");
    ImageTensor out = img;
    const std::uint16_t mask =
        static_cast<std::uint16_t>(~((1u << (n - q)) - 1u));
    for (auto& c : out.codes) c &= mask;
    out.effective_bits = q;
    out.role = (q == n) ? ImageRole::full : ImageRole::quantized;
    return out;
}

// R = O - I_q. Exact; quantized + residual == original.
inline ImageTensor residual(const ImageTensor& original, const ImageTensor& quantized) {
    if (!original.same_shape(quantized) || original.container_bits != quantized.container_bits)
        throw invalid_argument("residual: shape or bit-depth mismatch");
    const int n = original.container_bits;
    const int q = quantized.effective_bits;
    ImageTensor out(original.height, original.width, original.channels, n, n - q,
                    ImageRole::residual);
    const std::uint16_t limit_bits = static_cast<std::uint16_t>(n - q);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int d = static_cast<int>(original.codes[i]) - static_cast<int>(quantized.codes[i]);
        if (d < 0)
            throw contract_violation("residual: quantized code exceeds original (not a quantization pair)");
        if (d >= (1 << limit_bits))
            throw contract_violation("residual: difference exceeds 2^(N-q) (not a quantization pair)");
        out.codes[i] = static_cast<std::uint16_t>(d);
    }
    return out;
}

// bit = (code >> p) & 1 per element.
inline Bitplane extract_bitplane(const ImageTensor& img, int p) {
    if (p < 0 || p >= img.container_bits)
        throw invalid_argument("extract_bitplane: plane index out of range");
    Bitplane plane(img.height, img.width, img.channels, p);
    for (std::size_t i = 0; i < img.size(); ++i)
        plane.bits[i] = static_cast<std::uint8_t>((img.codes[i] >> p) & 1u);
    return plane;
}

// code = sum over planes of 2^p * bit. Missing planes contribute zero.
inline ImageTensor compose_bitplanes(const std::vector<Bitplane>& planes, int n_bits,
                                     int h = -1, int w = -1, int c = -1) {
    if (planes.empty()) {
        if (h <= 0 || w <= 0 || c <= 0)
            throw invalid_argument("compose_bitplanes: empty plane list needs explicit shape");
    } else {
        h = planes.front().height;
        w = planes.front().width;
        c = planes.front().channels;
    }
    std::uint32_t seen = 0;
    ImageTensor out(h, w, c, n_bits, n_bits, ImageRole::full);
    for (const auto& plane : planes) {
        if (plane.height != h || plane.width != w || plane.channels != c)
            throw invalid_argument("compose_bitplanes: plane shape mismatch");
        if (plane.plane_index < 0 || plane.plane_index >= n_bits)
            throw invalid_argument("compose_bitplanes: plane index out of range");
        if (seen & (1u << plane.plane_index))
            throw invalid_argument("compose_bitplanes: duplicate plane index");
        seen |= 1u << plane.plane_index;
        const std::uint16_t weight = static_cast<std::uint16_t>(1u << plane.plane_index);
        for (std::size_t i = 0; i < plane.size(); ++i)
            if (plane.bits[i]) out.codes[i] = static_cast<std::uint16_t>(out.codes[i] + weight);
    }
    return out;
}

// One inference step: add 2^p * bit and bump effective_bits. The plane
// must be the next missing one, i.e. p == N - (effective_bits + 1).
inline ImageTensor apply_bitplane(const ImageTensor& img, const Bitplane& plane) {
    if (!plane.same_shape(img)) throw invalid_argument("apply_bitplane: shape mismatch");
    const int n = img.container_bits;
    if (plane.plane_index != n - (img.effective_bits + 1))
        throw invalid_argument("apply_bitplane: plane " + std::to_string(plane.plane_index) +
                               " is not the next missing plane");
    ImageTensor out = img;
    const std::uint16_t weight = static_cast<std::uint16_t>(1u << plane.plane_index);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out.codes[i] & weight)
            throw contract_violation("apply_bitplane: bit already set at plane position");
        if (plane.bits[i]) out.codes[i] = static_cast<std::uint16_t>(out.codes[i] + weight);
    }
    out.effective_bits = img.effective_bits + 1;
    out.role = (out.effective_bits == n) ? ImageRole::full : ImageRole::quantized;
    return out;
}

} // namespace bitrec
