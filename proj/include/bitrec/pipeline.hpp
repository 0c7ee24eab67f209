#pragma once

#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

#include "bitrec/baselines.hpp"
#include "bitrec/image.hpp"
#include "bitrec/metrics.hpp"
#include "bitrec/nn/adam.hpp"
#include "bitrec/nn/serialize.hpp"
#include "bitrec/report.hpp"

namespace bitrec {

enum class LossKind { bce, mse };
enum class TargetKind { bitplane, next_image };
enum class TrainMode { bitplanewise, single_shot };

struct TrainConfig {
    int patch_size = 48;
    int batch_size = 128;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    int epochs = 30;
    int lr_drop_epoch = 16;     // lr divided by lr_drop_factor after this epoch
    double lr_drop_factor = 5.0;
    bool augment = true;
    std::uint64_t seed = 0;
    LossKind loss = LossKind::bce;
    TargetKind target = TargetKind::bitplane;
    TrainMode mode = TrainMode::bitplanewise;
    bool binarize_at_inference = true;
    int depth = 4; // D

    void validate() const {
        if (patch_size < 1) throw invalid_argument("TrainConfig: patch_size must be positive");
        if (batch_size < 1) throw invalid_argument("TrainConfig: batch_size must be positive");
        if (epochs < 1) throw invalid_argument("TrainConfig: epochs must be >= 1");
        if (lr <= 0) throw invalid_argument("TrainConfig: lr must be positive");
    }

    double lr_at_epoch(int epoch) const {
        return epoch > lr_drop_epoch ? lr / lr_drop_factor : lr;
    }

    std::string canonical() const {
        std::ostringstream s;
        s.precision(17);
        s << "patch_size=" << patch_size << ";batch_size=" << batch_size << ";lr=" << lr
          << ";beta1=" << beta1 << ";beta2=" << beta2 << ";epochs=" << epochs
          << ";lr_drop_epoch=" << lr_drop_epoch << ";lr_drop_factor=" << lr_drop_factor
          << ";augment=" << augment << ";seed=" << seed
          << ";loss=" << (loss == LossKind::bce ? "bce" : "mse")
          << ";target=" << (target == TargetKind::bitplane ? "bitplane" : "next_image")
          << ";mode=" << (mode == TrainMode::bitplanewise ? "bitplanewise" : "single_shot")
          << ";binarize_at_inference=" << binarize_at_inference << ";depth=" << depth;
        return s.str();
    }

    // FNV-1a over the canonical form, for the bundle manifest.
    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ull;
        for (char c : canonical()) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        return h;
    }
};

struct TrainingPair {
    ImageTensor input;        // quantize(O, q+k-1)
    Bitplane target_plane;    // extract_bitplane(O, N-(q+k))
    ImageTensor target_image; // quantize(O, q+k), next_image ablation only
};

// Supervised pair generation for step k in 1..N-q.
inline TrainingPair make_training_pairs(const ImageTensor& ground_truth, int k,
                                        const RecoveryRange& range,
                                        TargetKind target = TargetKind::bitplane) {
    if (k < 1 || k > range.steps())
        throw invalid_argument("make_training_pairs: k out of [1, N-q]");
    const int q = range.source_bits, n = range.target_bits;
    TrainingPair pair;
    pair.input = quantize(ground_truth, q + k - 1);
    pair.target_plane = extract_bitplane(ground_truth, n - (q + k));
    if (target == TargetKind::next_image) pair.target_image = quantize(ground_truth, q + k);
    return pair;
}

// Non-overlapping tiling from the top-left; partial border tiles dropped.
inline std::vector<ImageTensor> extract_patches(const ImageTensor& img, int size) {
    std::vector<ImageTensor> patches;
    if (size > img.height || size > img.width) return patches;
    for (int ty = 0; ty + size <= img.height; ty += size)
        for (int tx = 0; tx + size <= img.width; tx += size) {
            ImageTensor p(size, size, img.channels, img.container_bits, img.effective_bits,
                          img.role);
            for (int y = 0; y < size; ++y)
                for (int x = 0; x < size; ++x)
                    for (int c = 0; c < img.channels; ++c)
                        p.at(y, x, c) = img.at(ty + y, tx + x, c);
            patches.push_back(std::move(p));
        }
    return patches;
}

// Independent coin flips: horizontal flip, vertical flip, 90-degree
// rotation. Square patches only.
inline ImageTensor augment(const ImageTensor& patch, std::mt19937& rng) {
    if (patch.height != patch.width) throw invalid_argument("augment: patch must be square");
    const bool hflip = (rng() & 1u) != 0;
    const bool vflip = (rng() & 1u) != 0;
    const bool rot90 = (rng() & 1u) != 0;
    const int s = patch.height;
    ImageTensor out = patch;
    for (int y = 0; y < s; ++y)
        for (int x = 0; x < s; ++x) {
            int sy = y, sx = x;
            if (rot90) {
                sy = x;
                sx = s - 1 - y;
            }
            if (hflip) sx = s - 1 - sx;
            if (vflip) sy = s - 1 - sy;
            for (int c = 0; c < patch.channels; ++c) out.at(y, x, c) = patch.at(sy, sx, c);
        }
    return out;
}

namespace detail {

template <typename T>
nn::Tensor4<T> to_normalized(const std::vector<const ImageTensor*>& batch) {
    const ImageTensor& first = *batch.front();
    nn::Tensor4<T> t(static_cast<int>(batch.size()), first.channels, first.height, first.width);
    const T scale = T(1) / static_cast<T>((1u << first.container_bits) - 1u);
    const std::size_t hw = static_cast<std::size_t>(first.height) * first.width;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const ImageTensor& img = *batch[i];
        T* dst = t.sample(static_cast<int>(i));
        for (int c = 0; c < img.channels; ++c)
            for (std::size_t j = 0; j < hw; ++j)
                dst[c * hw + j] = img.codes[j * img.channels + c] * scale;
    }
    return t;
}

template <typename T>
nn::Tensor4<T> planes_to_tensor(const std::vector<Bitplane>& planes) {
    const Bitplane& first = planes.front();
    nn::Tensor4<T> t(static_cast<int>(planes.size()), first.channels, first.height, first.width);
    const std::size_t hw = static_cast<std::size_t>(first.height) * first.width;
    for (std::size_t i = 0; i < planes.size(); ++i) {
        T* dst = t.sample(static_cast<int>(i));
        for (int c = 0; c < first.channels; ++c)
            for (std::size_t j = 0; j < hw; ++j)
                dst[c * hw + j] = static_cast<T>(planes[i].bits[j * first.channels + c]);
    }
    return t;
}

inline Bitplane tensor_to_plane(const nn::Tensor4<float>& t, int sample, int plane_index) {
    // Threshold at 0.5, ties round up.
    Bitplane plane(t.h, t.w, t.c, plane_index);
    const std::size_t hw = static_cast<std::size_t>(t.h) * t.w;
    const float* src = t.sample(sample);
    for (int c = 0; c < t.c; ++c)
        for (std::size_t j = 0; j < hw; ++j)
            plane.bits[j * t.c + c] = src[c * hw + j] >= 0.5f ? 1 : 0;
    return plane;
}

} // namespace detail

struct TrainLogRow {
    int epoch = 0;
    int step = 0;
    double lr = 0.0;
    double loss = 0.0;
};

struct TrainLog {
    std::vector<TrainLogRow> rows;
    std::vector<double> epoch_means;

    std::string to_csv() const {
        std::ostringstream out;
        out.precision(12);
        out << "epoch,step,lr,loss\n";
        for (const auto& r : rows)
            out << r.epoch << "," << r.step << "," << r.lr << "," << r.loss << "\n";
        return out.str();
    }
};

struct ModelBundle {
    RecoveryRange range;
    std::vector<nn::BitplaneNetwork<float>> networks; // MSB-first plane order
    TrainConfig config;
    std::vector<TrainLog> logs;
};

namespace detail {

struct Trainer {
    std::vector<nn::AdamState<float>> states;

    void attach(nn::BitplaneNetwork<float>& net, double lr) {
        states.clear();
        for (auto& p : net.params())
            if (p.grad) states.emplace_back(p.value->size(), lr);
    }

    void step(nn::BitplaneNetwork<float>& net, double lr) {
        std::size_t i = 0;
        for (auto& p : net.params()) {
            if (!p.grad) continue;
            states[i].lr = lr;
            nn::adam_step(*p.value, *p.grad, states[i]);
            ++i;
        }
    }
};

} // namespace detail

// Trains the step-k network on ground-truth-derived pairs: input
// quantize(O, q+k-1), target the plane N-(q+k) (or the next quantized
// image in the ablation mode). Single-threaded and deterministic for a
// fixed seed.
inline nn::BitplaneNetwork<float> train_bitplane_network(const std::vector<ImageTensor>& corpus,
                                                         int k, const RecoveryRange& range,
                                                         const TrainConfig& config,
                                                         TrainLog* log = nullptr) {
    config.validate();
    if (corpus.empty()) throw invalid_argument("train_bitplane_network: empty corpus");
    if (k < 1 || k > range.steps())
        throw invalid_argument("train_bitplane_network: k out of [1, N-q]");
    const int n = range.target_bits;
    for (const auto& img : corpus)
        if (img.container_bits != n || img.effective_bits != n)
            throw invalid_argument("train_bitplane_network: corpus must be full-depth at N");

    std::vector<ImageTensor> patches;
    for (const auto& img : corpus)
        for (auto& p : extract_patches(img, config.patch_size)) patches.push_back(std::move(p));
    if (static_cast<int>(patches.size()) < config.batch_size)
        throw invalid_argument("train_bitplane_network: fewer patches than one batch");

    std::mt19937 rng(static_cast<std::uint32_t>(config.seed + 0x9e3779b9u * k));
    nn::BitplaneNetwork<float> net(config.depth, corpus.front().channels, true);
    net.plane_index = n - (range.source_bits + k);
    net.source_bits = range.source_bits + k - 1;
    net.container_bits = n;
    net.init(rng);

    detail::Trainer trainer;
    trainer.attach(net, config.lr);

    std::vector<std::size_t> order(patches.size());
    std::iota(order.begin(), order.end(), 0);
    const int steps_per_epoch = static_cast<int>(patches.size()) / config.batch_size;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const double lr = config.lr_at_epoch(epoch);
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (int step = 0; step < steps_per_epoch; ++step) {
            std::vector<ImageTensor> inputs;
            std::vector<Bitplane> plane_targets;
            std::vector<ImageTensor> image_targets;
            inputs.reserve(config.batch_size);
            for (int b = 0; b < config.batch_size; ++b) {
                const ImageTensor& patch = patches[order[step * config.batch_size + b]];
                const ImageTensor aug = config.augment ? augment(patch, rng) : patch;
                TrainingPair pair = make_training_pairs(aug, k, range, config.target);
                inputs.push_back(std::move(pair.input));
                if (config.target == TargetKind::bitplane)
                    plane_targets.push_back(std::move(pair.target_plane));
                else
                    image_targets.push_back(std::move(pair.target_image));
            }
            std::vector<const ImageTensor*> in_ptrs;
            for (const auto& img : inputs) in_ptrs.push_back(&img);
            nn::Tensor4<float> x = detail::to_normalized<float>(in_ptrs);

            nn::Tensor4<float> target;
            if (config.target == TargetKind::bitplane) {
                target = detail::planes_to_tensor<float>(plane_targets);
            } else {
                std::vector<const ImageTensor*> t_ptrs;
                for (const auto& img : image_targets) t_ptrs.push_back(&img);
                target = detail::to_normalized<float>(t_ptrs);
            }

            net.zero_grad();
            nn::Tensor4<float> pred = net.forward(x, nn::BnMode::train);
            double loss;
            nn::Tensor4<float> grad;
            if (config.loss == LossKind::bce) {
                loss = nn::bce_loss(pred, target);
                grad = nn::bce_loss_backward(pred, target);
            } else {
                loss = nn::mse_loss(pred, target);
                grad = nn::mse_loss_backward(pred, target);
            }
            net.backward(grad);
            trainer.step(net, lr);

            epoch_loss += loss;
            if (log) log->rows.push_back({epoch, step, lr, loss});
        }
        if (log) log->epoch_means.push_back(epoch_loss / steps_per_epoch);
    }
    return net;
}

// Trains the N-q networks independently, most significant lost plane
// first. Each network sees ground-truth-quantized inputs, never the
// predictions of its predecessors.
inline ModelBundle train_all(const std::vector<ImageTensor>& corpus, const RecoveryRange& range,
                             const TrainConfig& config) {
    ModelBundle bundle;
    bundle.range = range;
    bundle.config = config;
    for (int k = 1; k <= range.steps(); ++k) {
        TrainLog log;
        bundle.networks.push_back(train_bitplane_network(corpus, k, range, config, &log));
        bundle.logs.push_back(std::move(log));
    }
    return bundle;
}

// Sequential inference over an arbitrary plane predictor:
// predict(k, current) must return a 1 x C x H x W map in [0,1] for the
// plane range.plane_indices[k]. In binarized mode each map is
// thresholded at 0.5 (ties up) and applied as an exact bitplane; in
// raw-sigmoid mode fractional contributions accumulate and rounding
// happens once at final materialization. Intermediate stage images are
// appended to `stages` when given (rounded per stage for reporting).
template <typename Predictor>
ImageTensor recover_with(const ImageTensor& img_q, const RecoveryRange& range, bool binarize,
                         Predictor&& predict, std::vector<ImageTensor>* stages = nullptr) {
    if (img_q.effective_bits != range.source_bits ||
        img_q.container_bits != range.target_bits)
        throw invalid_argument("recover: image depth does not match recovery range");

    const int n = range.target_bits;
    const double maxval = static_cast<double>((1u << n) - 1u);

    if (binarize) {
        ImageTensor current = img_q;
        for (int k = 0; k < range.steps(); ++k) {
            nn::Tensor4<float> pred = predict(k, current);
            current = apply_bitplane(current,
                                     detail::tensor_to_plane(pred, 0, range.plane_indices[k]));
            if (stages) stages->push_back(current);
        }
        return current;
    }

    // Raw-sigmoid route: float accumulator, per-stage snapshots rounded.
    std::vector<double> acc(img_q.size());
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = img_q.codes[i];
    auto materialize = [&](int eff_bits) {
        ImageTensor out(img_q.height, img_q.width, img_q.channels, n, eff_bits,
                        eff_bits == n ? ImageRole::full : ImageRole::quantized);
        for (std::size_t i = 0; i < acc.size(); ++i)
            out.codes[i] = static_cast<std::uint16_t>(
                std::clamp(std::lround(acc[i]), 0l, static_cast<long>(maxval)));
        return out;
    };
    ImageTensor current = img_q;
    for (int k = 0; k < range.steps(); ++k) {
        nn::Tensor4<float> pred = predict(k, current);
        const double weight = static_cast<double>(1u << range.plane_indices[k]);
        const std::size_t hw = static_cast<std::size_t>(pred.h) * pred.w;
        const float* p = pred.sample(0);
        for (int c = 0; c < pred.c; ++c)
            for (std::size_t j = 0; j < hw; ++j) acc[j * pred.c + c] += weight * p[c * hw + j];
        current = materialize(range.source_bits + k + 1);
        // The rounded snapshot drives the next network's input so that the
        // normalization convention stays uniform across stages.
        if (stages) stages->push_back(current);
    }
    return materialize(n);
}

inline ImageTensor recover(const ImageTensor& img_q, ModelBundle& bundle,
                           std::vector<ImageTensor>* stages = nullptr) {
    if (static_cast<int>(bundle.networks.size()) != bundle.range.steps())
        throw invalid_argument("recover: bundle incomplete");
    for (int k = 0; k < bundle.range.steps(); ++k)
        if (bundle.networks[k].plane_index != bundle.range.plane_indices[k])
            throw invalid_argument("recover: bundle plane order does not match range");
    auto predict = [&bundle](int k, const ImageTensor& current) {
        std::vector<const ImageTensor*> batch{&current};
        nn::Tensor4<float> x = detail::to_normalized<float>(batch);
        return bundle.networks[k].forward(x, nn::BnMode::eval, false);
    };
    return recover_with(img_q, bundle.range, bundle.config.binarize_at_inference, predict,
                        stages);
}

// One network of (N-q)*D residual blocks, no sigmoid head, trained with
// MSE against the normalized residual R / (2^N - 1).
inline nn::BitplaneNetwork<float> single_shot_train(const std::vector<ImageTensor>& corpus,
                                                    const RecoveryRange& range,
                                                    const TrainConfig& config,
                                                    TrainLog* log = nullptr) {
    config.validate();
    if (corpus.empty()) throw invalid_argument("single_shot_train: empty corpus");
    const int n = range.target_bits, q = range.source_bits;

    std::vector<ImageTensor> patches;
    for (const auto& img : corpus)
        for (auto& p : extract_patches(img, config.patch_size)) patches.push_back(std::move(p));
    if (static_cast<int>(patches.size()) < config.batch_size)
        throw invalid_argument("single_shot_train: fewer patches than one batch");

    std::mt19937 rng(static_cast<std::uint32_t>(config.seed + 0x51a7u));
    nn::BitplaneNetwork<float> net(range.steps() * config.depth, corpus.front().channels, false);
    net.plane_index = -1;
    net.source_bits = q;
    net.container_bits = n;
    net.init(rng);

    detail::Trainer trainer;
    trainer.attach(net, config.lr);

    const float scale = 1.0f / static_cast<float>((1u << n) - 1u);
    std::vector<std::size_t> order(patches.size());
    std::iota(order.begin(), order.end(), 0);
    const int steps_per_epoch = static_cast<int>(patches.size()) / config.batch_size;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const double lr = config.lr_at_epoch(epoch);
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (int step = 0; step < steps_per_epoch; ++step) {
            std::vector<ImageTensor> inputs, residuals;
            for (int b = 0; b < config.batch_size; ++b) {
                const ImageTensor& patch = patches[order[step * config.batch_size + b]];
                const ImageTensor aug = config.augment ? augment(patch, rng) : patch;
                ImageTensor quant = quantize(aug, q);
                residuals.push_back(residual(aug, quant));
                inputs.push_back(std::move(quant));
            }
            std::vector<const ImageTensor*> in_ptrs;
            for (const auto& img : inputs) in_ptrs.push_back(&img);
            nn::Tensor4<float> x = detail::to_normalized<float>(in_ptrs);

            nn::Tensor4<float> target(x.n, x.c, x.h, x.w);
            const std::size_t hw = static_cast<std::size_t>(x.h) * x.w;
            for (int i = 0; i < x.n; ++i) {
                float* dst = target.sample(i);
                const auto& r = residuals[i];
                for (int c = 0; c < x.c; ++c)
                    for (std::size_t j = 0; j < hw; ++j)
                        dst[c * hw + j] = r.codes[j * x.c + c] * scale;
            }

            net.zero_grad();
            nn::Tensor4<float> pred = net.forward(x, nn::BnMode::train);
            const double loss = nn::mse_loss(pred, target);
            net.backward(nn::mse_loss_backward(pred, target));
            trainer.step(net, lr);

            epoch_loss += loss;
            if (log) log->rows.push_back({epoch, step, lr, loss});
        }
        if (log) log->epoch_means.push_back(epoch_loss / steps_per_epoch);
    }
    return net;
}

inline ImageTensor single_shot_recover(const ImageTensor& img_q,
                                       nn::BitplaneNetwork<float>& net) {
    if (img_q.effective_bits != net.source_bits || img_q.container_bits != net.container_bits)
        throw invalid_argument("single_shot_recover: image depth does not match network");
    const int n = net.container_bits;
    const double maxval = static_cast<double>((1u << n) - 1u);
    const long res_max = (1l << (n - net.source_bits)) - 1l;

    std::vector<const ImageTensor*> batch{&img_q};
    nn::Tensor4<float> x = detail::to_normalized<float>(batch);
    nn::Tensor4<float> pred = net.forward(x, nn::BnMode::eval, false);

    ImageTensor out = img_q;
    out.effective_bits = n;
    out.role = ImageRole::full;
    const std::size_t hw = static_cast<std::size_t>(x.h) * x.w;
    const float* p = pred.sample(0);
    for (int c = 0; c < x.c; ++c)
        for (std::size_t j = 0; j < hw; ++j) {
            const long r = std::clamp(std::lround(p[c * hw + j] * maxval), 0l, res_max);
            out.codes[j * x.c + c] = static_cast<std::uint16_t>(out.codes[j * x.c + c] + r);
        }
    return out;
}

// Quantizes each corpus image to q, recovers it with `recover_fn`
// (which must record the per-stage accumulation series), and scores
// PSNR/SSIM against the original alongside the classical baselines.
template <typename RecoverFn>
MetricsReport evaluate_with(const std::vector<ImageTensor>& corpus, const RecoveryRange& range,
                            RecoverFn&& recover_fn, bool with_baselines = true) {
    MetricsReport report;
    report.source_bits = range.source_bits;
    report.container_bits = range.target_bits;

    int idx = 0;
    for (const auto& original : corpus) {
        MetricsReport::Row row;
        row.id = "image_" + std::to_string(idx++);
        ImageTensor quant = quantize(original, range.source_bits);

        std::vector<ImageTensor> stages;
        ImageTensor recovered = recover_fn(quant, &stages);
        row.mse = metrics::mse(recovered, original);
        row.psnr = metrics::psnr(recovered, original);
        row.ssim = metrics::ssim(recovered, original);
        for (std::size_t k = 0; k < stages.size(); ++k)
            row.stages.push_back({range.plane_indices[k], metrics::psnr(stages[k], original),
                                  metrics::ssim(stages[k], original)});

        if (with_baselines) {
            for (auto [name, method] :
                 {std::pair{"zp", baselines::Method::zp}, std::pair{"mig", baselines::Method::mig},
                  std::pair{"br", baselines::Method::br}}) {
                ImageTensor b = baselines::run(method, quant);
                row.baseline_psnr[name] = metrics::psnr(b, original);
                row.baseline_ssim[name] = metrics::ssim(b, original);
            }
        }
        report.rows.push_back(std::move(row));
    }
    report.finalize();
    return report;
}

inline MetricsReport evaluate(const std::vector<ImageTensor>& corpus, ModelBundle& bundle,
                              bool with_baselines = true) {
    MetricsReport report = evaluate_with(
        corpus, bundle.range,
        [&bundle](const ImageTensor& quant, std::vector<ImageTensor>* stages) {
            return recover(quant, bundle, stages);
        },
        with_baselines);
    report.method =
        bundle.config.mode == TrainMode::bitplanewise ? "bitplanewise" : "single_shot";
    report.inference_mode = bundle.config.binarize_at_inference ? "binarized" : "raw-sigmoid";
    return report;
}

// Bundle directory: plane_<p>.bitr per network plus bundle.json.
inline void save_bundle(ModelBundle& bundle, const std::string& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json manifest{
        {"q", bundle.range.source_bits},
        {"N", bundle.range.target_bits},
        {"D", bundle.config.depth},
        {"config_hash", bundle.config.hash()},
        {"mode", bundle.config.mode == TrainMode::bitplanewise ? "bitplanewise" : "single_shot"},
        {"binarize_at_inference", bundle.config.binarize_at_inference},
        {"planes", nlohmann::json::array()}};
    for (std::size_t i = 0; i < bundle.networks.size(); ++i) {
        auto& net = bundle.networks[i];
        const std::string name = "plane_" + std::to_string(net.plane_index) + ".bitr";
        nn::save_model_file(net, (std::filesystem::path(dir) / name).string());
        manifest["planes"].push_back({{"plane", net.plane_index}, {"file", name}, {"D", net.depth}});
        if (i < bundle.logs.size()) {
            std::ofstream log((std::filesystem::path(dir) /
                               ("train_plane_" + std::to_string(net.plane_index) + ".csv"))
                                  .string());
            log << bundle.logs[i].to_csv();
        }
    }
    std::ofstream f((std::filesystem::path(dir) / "bundle.json").string());
    if (!f) throw io_error("cannot write bundle manifest in " + dir);
    f << manifest.dump(2) << "\n";
}

inline ModelBundle load_bundle(const std::string& dir) {
    const std::string manifest_path = (std::filesystem::path(dir) / "bundle.json").string();
    std::ifstream f(manifest_path);
    if (!f) throw io_error("cannot open bundle manifest: " + manifest_path);
    nlohmann::json manifest = nlohmann::json::parse(f, nullptr, false);
    if (manifest.is_discarded()) throw format_error("malformed bundle.json in " + dir);

    ModelBundle bundle;
    bundle.range = RecoveryRange(manifest.at("q").get<int>(), manifest.at("N").get<int>());
    bundle.config.depth = manifest.at("D").get<int>();
    bundle.config.mode = manifest.at("mode").get<std::string>() == "single_shot"
                             ? TrainMode::single_shot
                             : TrainMode::bitplanewise;
    if (manifest.contains("binarize_at_inference"))
        bundle.config.binarize_at_inference = manifest.at("binarize_at_inference").get<bool>();
    for (const auto& entry : manifest.at("planes")) {
        const std::string file =
            (std::filesystem::path(dir) / entry.at("file").get<std::string>()).string();
        bundle.networks.push_back(nn::load_model_file(file));
    }
    // MSB-first network order regardless of manifest order.
    std::sort(bundle.networks.begin(), bundle.networks.end(),
              [](const auto& a, const auto& b) { return a.plane_index > b.plane_index; });
    if (static_cast<int>(bundle.networks.size()) != bundle.range.steps())
        throw format_error("bundle " + dir + " does not cover all planes");
    return bundle;
}

} // namespace bitrec
