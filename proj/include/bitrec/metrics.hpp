#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "bitrec/image.hpp"

namespace bitrec {
namespace metrics {

inline double mse(const ImageTensor& a, const ImageTensor& b) {
    if (!a.same_shape(b) || a.container_bits != b.container_bits)
        throw invalid_argument("mse: shape or bit-depth mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a.codes[i]) - static_cast<double>(b.codes[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

// 10*log10(peak^2 / MSE) with peak = 2^N - 1. Identical images yield
// the +infinity sentinel.
inline double psnr(const ImageTensor& a, const ImageTensor& b) {
    const double m = mse(a, b);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    const double peak = static_cast<double>((1u << a.container_bits) - 1u);
    return 10.0 * std::log10(peak * peak / m);
}

namespace detail {

inline std::vector<double> gaussian_kernel_11(double sigma = 1.5) {
    std::vector<double> k(11);
    double sum = 0.0;
    for (int i = 0; i < 11; ++i) {
        const double x = i - 5;
        k[i] = std::exp(-x * x / (2.0 * sigma * sigma));
        sum += k[i];
    }
    for (auto& v : k) v /= sum;
    return k;
}

// Separable 11x11 Gaussian filter over the valid region. Input is one
// channel at full resolution; output is (h-10) x (w-10).
inline std::vector<double> filter_valid(const std::vector<double>& img, int h, int w,
                                        const std::vector<double>& k) {
    const int oh = h - 10, ow = w - 10;
    std::vector<double> rows(static_cast<std::size_t>(h) * ow);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < 11; ++i) acc += k[i] * img[static_cast<std::size_t>(y) * w + x + i];
            rows[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    std::vector<double> out(static_cast<std::size_t>(oh) * ow);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < 11; ++i) acc += k[i] * rows[static_cast<std::size_t>(y + i) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    return out;
}

inline double ssim_channel(const std::vector<double>& a, const std::vector<double>& b,
                           int h, int w, double peak) {
    const auto k = gaussian_kernel_11();
    const double c1 = (0.01 * peak) * (0.01 * peak);
    const double c2 = (0.03 * peak) * (0.03 * peak);

    std::vector<double> aa(a.size()), bb(b.size()), ab(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        aa[i] = a[i] * a[i];
        bb[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }
    const auto mu_a = filter_valid(a, h, w, k);
    const auto mu_b = filter_valid(b, h, w, k);
    const auto m_aa = filter_valid(aa, h, w, k);
    const auto m_bb = filter_valid(bb, h, w, k);
    const auto m_ab = filter_valid(ab, h, w, k);

    double acc = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double va = m_aa[i] - mu_a[i] * mu_a[i];
        const double vb = m_bb[i] - mu_b[i] * mu_b[i];
        const double cov = m_ab[i] - mu_a[i] * mu_b[i];
        acc += ((2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2)) /
               ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2));
    }
    return acc / static_cast<double>(mu_a.size());
}

} // namespace detail

// Mean local SSIM, 11x11 Gaussian window sigma=1.5, valid-window
// cropping, channels averaged.
inline double ssim(const ImageTensor& a, const ImageTensor& b) {
    if (!a.same_shape(b) || a.container_bits != b.container_bits)
        throw invalid_argument("ssim: shape or bit-depth mismatch");
    if (a.height < 11 || a.width < 11)
        throw invalid_argument("ssim: image smaller than 11x11 window");
    const double peak = static_cast<double>((1u << a.container_bits) - 1u);
    const std::size_t plane = static_cast<std::size_t>(a.height) * a.width;
    double total = 0.0;
    std::vector<double> ca(plane), cb(plane);
    for (int ch = 0; ch < a.channels; ++ch) {
        for (std::size_t i = 0; i < plane; ++i) {
            ca[i] = static_cast<double>(a.codes[i * a.channels + ch]);
            cb[i] = static_cast<double>(b.codes[i * b.channels + ch]);
        }
        total += detail::ssim_channel(ca, cb, a.height, a.width, peak);
    }
    return total / a.channels;
}

} // namespace metrics
} // namespace bitrec
