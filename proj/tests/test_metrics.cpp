#include <doctest.h>

#include <cmath>
#include <random>

#include "bitrec/image.hpp"
#include "bitrec/metrics.hpp"

using namespace bitrec;

namespace {

ImageTensor random_image(int h, int w, int c, int bits, std::mt19937& rng) {
    ImageTensor img(h, w, c, bits, bits, ImageRole::full);
    std::uniform_int_distribution<int> dist(0, (1 << bits) - 1);
    for (auto& v : img.codes) v = static_cast<std::uint16_t>(dist(rng));
    return img;
}

double mse_loop_oracle(const ImageTensor& a, const ImageTensor& b) {
    double acc = 0.0;
    for (int y = 0; y < a.height; ++y)
        for (int x = 0; x < a.width; ++x)
            for (int c = 0; c < a.channels; ++c) {
                const double d = static_cast<double>(a.at(y, x, c)) - b.at(y, x, c);
                acc += d * d;
            }
    return acc / (static_cast<double>(a.height) * a.width * a.channels);
}

// Direct per-window SSIM: for every valid 11x11 window compute the
// Gaussian-weighted moments with explicit loops.
double ssim_window_oracle(const ImageTensor& a, const ImageTensor& b) {
    const double sigma = 1.5;
    double kernel[11][11];
    double ksum = 0.0;
    for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
            const double dy = i - 5, dx = j - 5;
            kernel[i][j] = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            ksum += kernel[i][j];
        }
    for (auto& row : kernel)
        for (auto& v : row) v /= ksum;

    const double peak = (1u << a.container_bits) - 1u;
    const double c1 = (0.01 * peak) * (0.01 * peak);
    const double c2 = (0.03 * peak) * (0.03 * peak);

    double total = 0.0;
    for (int ch = 0; ch < a.channels; ++ch) {
        double acc = 0.0;
        int count = 0;
        for (int y = 0; y + 11 <= a.height; ++y)
            for (int x = 0; x + 11 <= a.width; ++x) {
                double ma = 0, mb = 0, maa = 0, mbb = 0, mab = 0;
                for (int i = 0; i < 11; ++i)
                    for (int j = 0; j < 11; ++j) {
                        const double va = a.at(y + i, x + j, ch);
                        const double vb = b.at(y + i, x + j, ch);
                        const double w = kernel[i][j];
                        ma += w * va;
                        mb += w * vb;
                        maa += w * va * va;
                        mbb += w * vb * vb;
                        mab += w * va * vb;
                    }
                const double var_a = maa - ma * ma;
                const double var_b = mbb - mb * mb;
                const double cov = mab - ma * mb;
                acc += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                       ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
                ++count;
            }
        total += acc / count;
    }
    return total / a.channels;
}

} // namespace

TEST_CASE("mse: trivial and oracle cases") {
    std::mt19937 rng(11);
    ImageTensor a = random_image(8, 8, 3, 8, rng);
    CHECK(metrics::mse(a, a) == 0.0);

    ImageTensor b = a;
    for (auto& c : b.codes) c = static_cast<std::uint16_t>(c >= 16 ? c - 16 : c + 16);
    CHECK(metrics::mse(a, b) == doctest::Approx(256.0).epsilon(1e-12));

    ImageTensor r1 = random_image(9, 7, 3, 8, rng);
    ImageTensor r2 = random_image(9, 7, 3, 8, rng);
    CHECK(metrics::mse(r1, r2) ==
          doctest::Approx(mse_loop_oracle(r1, r2)).epsilon(1e-9));

    ImageTensor wrong(8, 9, 3, 8, 8, ImageRole::full);
    CHECK_THROWS_AS(metrics::mse(a, wrong), invalid_argument);
}

TEST_CASE("psnr: sentinel and closed forms") {
    std::mt19937 rng(12);
    ImageTensor a = random_image(8, 8, 1, 8, rng);
    CHECK(std::isinf(metrics::psnr(a, a)));

    ImageTensor b = a;
    for (auto& c : b.codes) c = static_cast<std::uint16_t>(c >= 16 ? c - 16 : c + 16);
    CHECK(metrics::psnr(a, b) ==
          doctest::Approx(20.0 * std::log10(255.0 / 16.0)).epsilon(1e-9));

    ImageTensor x = random_image(4, 4, 1, 16, rng);
    ImageTensor y = x;
    for (auto& c : y.codes) c = static_cast<std::uint16_t>(c >= 1 ? c - 1 : c + 1);
    CHECK(metrics::psnr(x, y) == doctest::Approx(20.0 * std::log10(65535.0)).epsilon(1e-9));
}

TEST_CASE("psnr: symmetric and decreasing in MSE") {
    std::mt19937 rng(13);
    ImageTensor a = random_image(12, 12, 3, 8, rng);
    ImageTensor b = random_image(12, 12, 3, 8, rng);
    CHECK(metrics::psnr(a, b) == metrics::psnr(b, a));

    ImageTensor near = a, far = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
        near.codes[i] = static_cast<std::uint16_t>(std::min(255, a.codes[i] + 2));
        far.codes[i] = static_cast<std::uint16_t>(std::min(255, a.codes[i] + 20));
    }
    CHECK(metrics::psnr(a, near) > metrics::psnr(a, far));
}

TEST_CASE("ssim: identity and anti-correlation sign") {
    std::mt19937 rng(14);
    ImageTensor a = random_image(16, 16, 3, 8, rng);
    CHECK(metrics::ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    // binary image against its inversion: structure anti-correlates
    ImageTensor bin(16, 16, 1, 8, 8, ImageRole::full);
    for (std::size_t i = 0; i < bin.size(); ++i) bin.codes[i] = (rng() & 1u) ? 255 : 0;
    ImageTensor inv = bin;
    for (auto& c : inv.codes) c = static_cast<std::uint16_t>(255 - c);
    CHECK(metrics::ssim(bin, inv) < 0.0);
}

TEST_CASE("ssim: matches the naive per-window oracle") {
    std::mt19937 rng(15);
    for (int trial = 0; trial < 5; ++trial) {
        ImageTensor a = random_image(32, 32, trial % 2 ? 3 : 1, 8, rng);
        ImageTensor b = a;
        std::uniform_int_distribution<int> noise(-20, 20);
        for (auto& c : b.codes)
            c = static_cast<std::uint16_t>(std::clamp(c + noise(rng), 0, 255));
        const double got = metrics::ssim(a, b);
        const double want = ssim_window_oracle(a, b);
        REQUIRE(got == doctest::Approx(want).epsilon(1e-6));
    }
}

TEST_CASE("ssim: undersized image rejected") {
    ImageTensor tiny(10, 10, 1, 8, 8, ImageRole::full);
    CHECK_THROWS_AS(metrics::ssim(tiny, tiny), invalid_argument);
}

TEST_CASE("accumulation with ground-truth planes strictly increases PSNR") {
    std::mt19937 rng(16);
    ImageTensor o = random_image(12, 12, 3, 8, rng);
    const int q = 3;
    ImageTensor current = quantize(o, q);
    double prev = metrics::psnr(current, o);
    for (int p = 8 - (q + 1); p >= 0; --p) {
        current = apply_bitplane(current, extract_bitplane(o, p));
        const double now = metrics::psnr(current, o);
        REQUIRE(now > prev);
        prev = now;
    }
    CHECK(std::isinf(prev));
}
