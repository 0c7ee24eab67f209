// Acceptance gate: one pass/fail line per criterion, nonzero exit when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "bitrec/nn/gradcheck_suite.hpp"
#include "bitrec/pipeline.hpp"
#include "bitrec/synth.hpp"

using namespace bitrec;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

ImageTensor random_image(int h, int w, int c, int bits, std::mt19937& rng) {
    ImageTensor img(h, w, c, bits, bits, ImageRole::full);
    std::uniform_int_distribution<int> dist(0, (1 << bits) - 1);
    for (auto& v : img.codes) v = static_cast<std::uint16_t>(dist(rng));
    return img;
}

// Oracle predictor: emits the true bitplane of `original` for step k.
struct OraclePredictor {
    const ImageTensor& original;
    const RecoveryRange& range;
    nn::Tensor4<float> operator()(int k, const ImageTensor& current) const {
        Bitplane truth = extract_bitplane(original, range.plane_indices[k]);
        nn::Tensor4<float> pred(1, current.channels, current.height, current.width);
        const std::size_t hw = static_cast<std::size_t>(current.height) * current.width;
        float* dst = pred.sample(0);
        for (int c = 0; c < current.channels; ++c)
            for (std::size_t j = 0; j < hw; ++j)
                dst[c * hw + j] = static_cast<float>(truth.bits[j * current.channels + c]);
        return pred;
    }
};

// --- criterion 1: exhaustive bit algebra ------------------------------

bool criterion_bit_algebra(std::string& detail) {
    const auto t0 = Clock::now();
    for (int n = 2; n <= 16; ++n) {
        // One image holding every code of the N-bit range.
        const int total = 1 << n;
        const int w = std::min(total, 256);
        const int h = total / w;
        ImageTensor all(h, w, 1, n, n, ImageRole::full);
        for (int i = 0; i < total; ++i) all.codes[i] = static_cast<std::uint16_t>(i);

        // Every plane round-trips through extract/compose.
        std::vector<Bitplane> planes;
        for (int p = 0; p < n; ++p) planes.push_back(extract_bitplane(all, p));
        if (compose_bitplanes(planes, n).codes != all.codes) {
            detail = "bitplane round trip failed at N=" + std::to_string(n);
            return false;
        }

        for (int q = 1; q < n; ++q) {
            ImageTensor quant = quantize(all, q);
            const std::uint16_t mask = static_cast<std::uint16_t>(~((1u << (n - q)) - 1u));
            for (int i = 0; i < total; ++i)
                if (quant.codes[i] != (all.codes[i] & mask)) {
                    detail = "quantization mask mismatch at N=" + std::to_string(n) +
                             " q=" + std::to_string(q);
                    return false;
                }
            ImageTensor res = residual(all, quant);
            for (int i = 0; i < total; ++i)
                if (quant.codes[i] + res.codes[i] != all.codes[i] ||
                    res.codes[i] >= (1u << (n - q))) {
                    detail = "closure I_q + R == O failed at N=" + std::to_string(n) +
                             " q=" + std::to_string(q);
                    return false;
                }

            // Sequentially re-applying the missing planes restores O exactly.
            ImageTensor rebuilt = quant;
            for (int p = n - q - 1; p >= 0; --p)
                rebuilt = apply_bitplane(rebuilt, extract_bitplane(all, p));
            if (rebuilt.codes != all.codes) {
                detail = "sequential plane application failed at N=" + std::to_string(n);
                return false;
            }
        }
    }
    const double dt = seconds_since(t0);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "all (N,q,code) combinations, %.1f s", dt);
    detail = buf;
    return dt < 10.0;
}

// --- criterion 2: baseline identities ---------------------------------

bool criterion_baseline_identities(std::string& detail) {
    // 4-bit pattern 1011 replicated across 8 bits: 10111011 = 187.
    if (baselines::bit_replicate_code(0b1011'0000, 4, 8) != 187) {
        detail = "BR(1011, 4->8) != 187";
        return false;
    }
    // MIG == BR exactly whenever N == 2q.
    for (int q = 1; q <= 8; ++q) {
        const int n = 2 * q;
        for (int code = 0; code < (1 << n); code += (1 << (n - q))) {
            const auto c = static_cast<std::uint16_t>(code);
            if (baselines::ideal_gain_code(c, q, n) != baselines::bit_replicate_code(c, q, n)) {
                detail = "MIG != BR at N=2q with q=" + std::to_string(q);
                return false;
            }
        }
    }
    // Every baseline preserves the surviving top q bits.
    std::mt19937 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 13);
        const int q = 1 + static_cast<int>(rng() % (n - 1));
        ImageTensor img = random_image(4, 4, 1, n, rng);
        ImageTensor quant = quantize(img, q);
        const std::uint16_t mask = static_cast<std::uint16_t>(~((1u << (n - q)) - 1u));
        for (auto method : {baselines::Method::zp, baselines::Method::mig,
                            baselines::Method::br}) {
            ImageTensor rec = baselines::run(method, quant);
            for (std::size_t i = 0; i < rec.size(); ++i)
                if ((rec.codes[i] & mask) != quant.codes[i]) {
                    detail = "baseline disturbed the top q bits";
                    return false;
                }
        }
    }
    detail = "BR/MIG identities and top-bit preservation, exact";
    return true;
}

// --- criterion 3: gradient suite --------------------------------------

bool criterion_gradients(std::string& detail) {
    const auto t0 = Clock::now();
    double worst_ratio = 0.0;
    bool ok = true;
    for (const auto& r : nn::run_gradcheck_suite()) {
        ok = ok && r.pass();
        worst_ratio = std::max(worst_ratio, r.max_rel_error / r.tolerance);
        if (!r.pass()) detail = r.component + " max_rel_err " + std::to_string(r.max_rel_error);
    }
    const double dt = seconds_since(t0);
    if (ok) {
        char buf[96];
        std::snprintf(buf, sizeof(buf),
                      "conv/bn/relu/sigmoid/bce/mse/full-net, worst %.2f%% of tolerance, %.1f s",
                      100.0 * worst_ratio, dt);
        detail = buf;
    }
    return ok && dt < 120.0;
}

// --- criterion 4: oracle reconstruction -------------------------------

bool criterion_oracle_reconstruction(std::string& detail) {
    std::mt19937 rng(11);
    for (int i = 0; i < 100; ++i) {
        ImageTensor original = generate_synthetic_image(24, 16, 1, rng);
        for (int q = 3; q <= 15; ++q) {
            RecoveryRange range(q, 16);
            ImageTensor quant = quantize(original, q);
            ImageTensor rec =
                recover_with(quant, range, true, OraclePredictor{original, range});
            if (rec.codes != original.codes) {
                detail = "mismatch at image " + std::to_string(i) + ", q=" + std::to_string(q);
                return false;
            }
        }
    }
    detail = "100 16-bit images, q in {3..15}, bit-exact";
    return true;
}

// --- criteria 5, 6, 8: toy training, monotonicity, determinism --------

TrainConfig toy_config() {
    TrainConfig cfg;
    cfg.patch_size = 24;
    cfg.batch_size = 16;
    cfg.epochs = 3;
    cfg.depth = 1;
    cfg.lr = 1e-3;
    cfg.augment = false;
    cfg.seed = 17;
    cfg.binarize_at_inference = false;
    return cfg;
}

struct ToyRun {
    ModelBundle bundle;
    std::vector<ImageTensor> heldout;
    double train_seconds = 0.0;
};

ToyRun run_toy_training() {
    ToyRun run;
    auto corpus = generate_synthetic(40, 64, 8, 23, 1);
    run.heldout.assign(corpus.begin() + 32, corpus.end());
    corpus.resize(32);
    const auto t0 = Clock::now();
    run.bundle = train_all(corpus, RecoveryRange(4, 8), toy_config());
    run.train_seconds = seconds_since(t0);
    return run;
}

bool criterion_toy_training(ToyRun& run, std::string& detail) {
    // Per-plane epoch-average BCE must strictly decrease.
    for (std::size_t p = 0; p < run.bundle.logs.size(); ++p) {
        const auto& means = run.bundle.logs[p].epoch_means;
        for (std::size_t e = 1; e < means.size(); ++e)
            if (!(means[e] < means[e - 1])) {
                detail = "plane " + std::to_string(run.bundle.networks[p].plane_index) +
                         " BCE not strictly decreasing";
                return false;
            }
    }

    double psnr_rec = 0.0, psnr_zp = 0.0, psnr_mig = 0.0;
    for (const auto& original : run.heldout) {
        ImageTensor quant = quantize(original, 4);
        psnr_rec += metrics::psnr(recover(quant, run.bundle), original);
        psnr_zp += metrics::psnr(baselines::zero_pad(quant), original);
        psnr_mig += metrics::psnr(baselines::ideal_gain(quant), original);
    }
    const double count = static_cast<double>(run.heldout.size());
    psnr_rec /= count;
    psnr_zp /= count;
    psnr_mig /= count;

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "held-out PSNR %.2f dB vs zero-pad %.2f / ideal-gain %.2f, trained in %.0f s",
                  psnr_rec, psnr_zp, psnr_mig, run.train_seconds);
    detail = buf;
    return psnr_rec >= psnr_zp + 1.0 && psnr_rec >= psnr_mig && run.train_seconds < 300.0;
}

bool criterion_monotonic_accumulation(ToyRun& run, std::string& detail) {
    // Idealized series: with ground-truth planes each stage strictly
    // improves PSNR.
    std::mt19937 rng(29);
    ImageTensor original = generate_synthetic_image(48, 8, 1, rng);
    RecoveryRange range(3, 8);
    ImageTensor quant = quantize(original, 3);
    std::vector<ImageTensor> stages;
    (void)recover_with(quant, range, true, OraclePredictor{original, range}, &stages);
    double prev = metrics::psnr(quant, original);
    for (const auto& stage : stages) {
        const double cur = metrics::psnr(stage, original);
        if (!(cur > prev)) {
            detail = "idealized per-stage PSNR not strictly increasing";
            return false;
        }
        prev = cur;
    }

    // Trained series: non-decreasing within 0.1 dB slack, averaged over
    // the held-out images.
    std::vector<double> series(run.bundle.range.steps(), 0.0);
    for (const auto& img : run.heldout) {
        ImageTensor q4 = quantize(img, 4);
        std::vector<ImageTensor> tstages;
        (void)recover(q4, run.bundle, &tstages);
        for (std::size_t k = 0; k < tstages.size(); ++k)
            series[k] += metrics::psnr(tstages[k], img) / run.heldout.size();
    }
    for (std::size_t k = 1; k < series.size(); ++k)
        if (series[k] < series[k - 1] - 0.1) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "trained stage %zu dropped %.3f dB", k,
                          series[k - 1] - series[k]);
            detail = buf;
            return false;
        }
    std::string s = "trained stage series";
    for (double v : series) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), " %.2f", v);
        s += buf;
    }
    detail = "idealized strictly increasing;" + s + " dB";
    return true;
}

bool criterion_determinism(std::string& detail) {
    auto corpus = generate_synthetic(2, 16, 8, 31, 1);
    TrainConfig cfg;
    cfg.patch_size = 8;
    cfg.batch_size = 4;
    cfg.epochs = 2;
    cfg.depth = 1;
    cfg.seed = 41;
    RecoveryRange range(6, 8);

    ModelBundle b1 = train_all(corpus, range, cfg);
    ModelBundle b2 = train_all(corpus, range, cfg);
    for (std::size_t i = 0; i < b1.networks.size(); ++i)
        if (nn::save_model(b1.networks[i]) != nn::save_model(b2.networks[i])) {
            detail = "model files differ between identical runs";
            return false;
        }

    auto eval_corpus = generate_synthetic(2, 16, 8, 37, 1);
    const std::string r1 = evaluate(eval_corpus, b1, true).to_json().dump();
    const std::string r2 = evaluate(eval_corpus, b2, true).to_json().dump();
    if (r1 != r2) {
        detail = "evaluation reports differ between identical runs";
        return false;
    }
    detail = "bit-identical models and byte-identical reports across two runs";
    return true;
}

// --- criterion 7: metric oracles --------------------------------------

double ssim_reference(const ImageTensor& a, const ImageTensor& b) {
    // Direct per-window implementation, no separable filtering.
    std::vector<double> k(11);
    double ksum = 0.0;
    for (int i = 0; i < 11; ++i) {
        const double x = i - 5;
        k[i] = std::exp(-x * x / 4.5);
        ksum += k[i];
    }
    for (auto& v : k) v /= ksum;
    const double peak = static_cast<double>((1u << a.container_bits) - 1u);
    const double c1 = 0.01 * peak * 0.01 * peak, c2 = 0.03 * peak * 0.03 * peak;

    double total = 0.0;
    for (int ch = 0; ch < a.channels; ++ch) {
        double acc = 0.0;
        int windows = 0;
        for (int y = 0; y + 11 <= a.height; ++y)
            for (int x = 0; x + 11 <= a.width; ++x) {
                double ma = 0, mb = 0, maa = 0, mbb = 0, mab = 0;
                for (int i = 0; i < 11; ++i)
                    for (int j = 0; j < 11; ++j) {
                        const double wgt = k[i] * k[j];
                        const double va = a.at(y + i, x + j, ch);
                        const double vb = b.at(y + i, x + j, ch);
                        ma += wgt * va;
                        mb += wgt * vb;
                        maa += wgt * va * va;
                        mbb += wgt * vb * vb;
                        mab += wgt * va * vb;
                    }
                const double var_a = maa - ma * ma, var_b = mbb - mb * mb;
                const double cov = mab - ma * mb;
                acc += (2 * ma * mb + c1) * (2 * cov + c2) /
                       ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
                ++windows;
            }
        total += acc / windows;
    }
    return total / a.channels;
}

bool criterion_metric_oracles(std::string& detail) {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const int bits = (trial % 2) ? 8 : 16;
        const int channels = (trial % 3) ? 1 : 3;
        ImageTensor a = random_image(32, 32, channels, bits, rng);
        ImageTensor b = a;
        std::uniform_int_distribution<int> jitter(-40, 40);
        const int maxc = (1 << bits) - 1;
        for (auto& c : b.codes) {
            int v = c + jitter(rng);
            c = static_cast<std::uint16_t>(std::clamp(v, 0, maxc));
        }

        double ref_mse = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = double(a.codes[i]) - double(b.codes[i]);
            ref_mse += d * d;
        }
        ref_mse /= static_cast<double>(a.size());
        const double ref_psnr =
            10.0 * std::log10(double(maxc) * maxc / ref_mse);
        const double ref_ssim = ssim_reference(a, b);

        if (std::abs(metrics::mse(a, b) - ref_mse) > 1e-6 * std::max(1.0, ref_mse) ||
            std::abs(metrics::psnr(a, b) - ref_psnr) > 1e-6 * std::abs(ref_psnr) ||
            std::abs(metrics::ssim(a, b) - ref_ssim) > 1e-6 * std::abs(ref_ssim)) {
            detail = "metric deviates from reference at trial " + std::to_string(trial);
            return false;
        }
    }

    // Constant error of 16 codes at N=8: PSNR == 20*log10(255/16).
    ImageTensor a(16, 16, 1, 8, 8, ImageRole::full);
    ImageTensor b = a;
    for (auto& c : a.codes) c = 100;
    for (auto& c : b.codes) c = 116;
    const double expected = 20.0 * std::log10(255.0 / 16.0);
    if (std::abs(metrics::psnr(a, b) - expected) > 1e-9) {
        detail = "constant-error PSNR identity violated";
        return false;
    }
    detail = "MSE/PSNR/SSIM within 1e-6 of references; closed-form PSNR within 1e-9";
    return true;
}

// --- criterion 9: serialization ---------------------------------------

bool criterion_serialization(std::string& detail) {
    auto corpus = generate_synthetic(2, 16, 8, 53, 1);
    TrainConfig cfg;
    cfg.patch_size = 8;
    cfg.batch_size = 4;
    cfg.epochs = 1;
    cfg.depth = 1;
    cfg.seed = 59;
    auto net = train_bitplane_network(corpus, 1, RecoveryRange(6, 8), cfg);

    const std::string bytes = nn::save_model(net);
    auto loaded = nn::load_model(bytes);
    if (nn::save_model(loaded) != bytes) {
        detail = "save -> load -> save not byte-identical";
        return false;
    }

    auto rejects = [](const std::string& blob) {
        try {
            (void)nn::load_model(blob);
            return false;
        } catch (const format_error&) {
            return true;
        }
    };
    std::string truncated = bytes.substr(0, bytes.size() / 2);
    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    std::string trailing = bytes + "junk";
    std::string bad_name = bytes;
    bad_name[40] ^= 0x5a; // inside the first tensor-name region
    if (!rejects(truncated) || !rejects(bad_magic) || !rejects(trailing) ||
        !rejects(bad_name)) {
        detail = "a corrupted model file was accepted";
        return false;
    }
    detail = "round trip byte-identical; truncation/magic/name/trailing corruption rejected";
    return true;
}

} // namespace

int main() {
    int failures = 0;
    auto report = [&](int index, const char* title, bool ok, const std::string& detail) {
        std::printf("[%s] %d. %s — %s\n", ok ? "PASS" : "FAIL", index, title, detail.c_str());
        if (!ok) ++failures;
    };

    std::string d;
    report(1, "exhaustive bit algebra", criterion_bit_algebra(d), d);
    report(2, "baseline identities", criterion_baseline_identities(d), d);
    report(3, "gradient suite", criterion_gradients(d), d);
    report(4, "oracle reconstruction", criterion_oracle_reconstruction(d), d);

    ToyRun toy = run_toy_training();
    report(5, "toy training beats classical baselines", criterion_toy_training(toy, d), d);
    report(6, "per-stage accumulation monotonicity", criterion_monotonic_accumulation(toy, d), d);
    report(7, "metric oracles", criterion_metric_oracles(d), d);
    report(8, "determinism", criterion_determinism(d), d);
    report(9, "model serialization", criterion_serialization(d), d);

    return failures == 0 ? 0 : 1;
}
