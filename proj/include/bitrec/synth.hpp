#pragma once

#include <cmath>
#include <random>

#include "bitrec/image.hpp"

namespace bitrec {

// Desk-scale corpus generator: smooth mixtures of an oriented ramp, a
// low-frequency sinusoid, and soft Gaussian blobs, spanning the full
// code range so every bitplane is populated.
inline ImageTensor generate_synthetic_image(int size, int bits, int channels,
                                            std::mt19937& rng) {
    ImageTensor img(size, size, channels, bits, bits, ImageRole::full);
    const double maxval = static_cast<double>((1u << bits) - 1u);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int ch = 0; ch < channels; ++ch) {
        const double theta = unit(rng) * 2.0 * M_PI;
        const double ramp_x = std::cos(theta), ramp_y = std::sin(theta);
        const double fx = 0.5 + 1.5 * unit(rng);
        const double fy = 0.5 + 1.5 * unit(rng);
        const double phase = unit(rng) * 2.0 * M_PI;

        struct Blob { double cx, cy, sigma, amp; };
        std::vector<Blob> blobs(3);
        for (auto& b : blobs) {
            b.cx = unit(rng) * size;
            b.cy = unit(rng) * size;
            b.sigma = size * (0.1 + 0.2 * unit(rng));
            b.amp = (unit(rng) - 0.5) * 0.8;
        }

        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) {
                const double u = static_cast<double>(x) / (size - 1);
                const double v = static_cast<double>(y) / (size - 1);
                const double ramp = 0.5 * (ramp_x * (u - 0.5) + ramp_y * (v - 0.5)) + 0.5;
                const double wave =
                    0.5 + 0.5 * std::sin(2.0 * M_PI * (fx * u + fy * v) + phase);
                double f = 0.5 + 0.55 * (ramp - 0.5) + 0.35 * (wave - 0.5);
                for (const auto& b : blobs) {
                    const double dx = x - b.cx, dy = y - b.cy;
                    f += b.amp * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
                }
                f = std::clamp(f, 0.0, 1.0);
                img.at(y, x, ch) = static_cast<std::uint16_t>(std::lround(f * maxval));
            }
    }
    return img;
}

inline std::vector<ImageTensor> generate_synthetic(int count, int size, int bits,
                                                   std::uint64_t seed, int channels = 3) {
    if (bits < 2 || bits > 16) throw invalid_argument("generate_synthetic: bits out of [2,16]");
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    std::vector<ImageTensor> corpus;
    corpus.reserve(count);
    for (int i = 0; i < count; ++i)
        corpus.push_back(generate_synthetic_image(size, bits, channels, rng));
    return corpus;
}

} // namespace bitrec
