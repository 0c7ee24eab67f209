// bitrec: bit-depth recovery toolkit command-line front end.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "bitrec/io/config.hpp"
#include "bitrec/io/image_io.hpp"
#include "bitrec/nn/gradcheck_suite.hpp"
#include "bitrec/pipeline.hpp"
#include "bitrec/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitContract = 4;

int cmd_quantize(int bits, const std::string& in, const std::string& out) {
    bitrec::ImageTensor img = bitrec::io::load_image(in);
    bitrec::io::save_image(bitrec::quantize(img, bits), out);
    return kExitOk;
}

int cmd_baseline(const std::string& method, int from_bits, const std::string& in,
                 const std::string& out) {
    bitrec::ImageTensor img = bitrec::io::load_image(in);
    img = bitrec::quantize(img, from_bits); // asserts the declared depth, zeroes nothing new
    bitrec::baselines::Method m;
    if (method == "zp") m = bitrec::baselines::Method::zp;
    else if (method == "mig") m = bitrec::baselines::Method::mig;
    else if (method == "br") m = bitrec::baselines::Method::br;
    else throw CLI::ValidationError("--method must be zp, mig, or br");
    bitrec::io::save_image(bitrec::baselines::run(m, img), out);
    return kExitOk;
}

std::vector<bitrec::ImageTensor> job_corpus(const bitrec::io::TrainJob& job) {
    if (!job.manifest.empty()) {
        auto manifest = bitrec::io::load_manifest(job.manifest);
        auto images = bitrec::io::load_manifest_images(manifest, "train");
        if (images.empty()) images = bitrec::io::load_manifest_images(manifest);
        return images;
    }
    return bitrec::generate_synthetic(job.synth_count, job.synth_size, job.target_bits,
                                      job.synth_seed, job.channels);
}

int cmd_train(const std::string& config_path, const std::string& out_dir) {
    bitrec::io::TrainJob job = bitrec::io::load_train_config(config_path);
    auto corpus = job_corpus(job);
    bitrec::RecoveryRange range(job.source_bits, job.target_bits);

    if (job.config.mode == bitrec::TrainMode::single_shot) {
        bitrec::TrainLog log;
        auto net = bitrec::single_shot_train(corpus, range, job.config, &log);
        std::filesystem::create_directories(out_dir);
        bitrec::nn::save_model_file(net,
                                    (std::filesystem::path(out_dir) / "single_shot.bitr").string());
        std::ofstream log_file((std::filesystem::path(out_dir) / "train_single_shot.csv").string());
        log_file << log.to_csv();
        nlohmann::json manifest{{"q", range.source_bits}, {"N", range.target_bits},
                                {"D", job.config.depth}, {"mode", "single_shot"},
                                {"config_hash", job.config.hash()}};
        std::ofstream mf((std::filesystem::path(out_dir) / "bundle.json").string());
        mf << manifest.dump(2) << "\n";
        return kExitOk;
    }

    bitrec::ModelBundle bundle = bitrec::train_all(corpus, range, job.config);
    bitrec::save_bundle(bundle, out_dir);
    return kExitOk;
}

int cmd_recover(const std::string& bundle_dir, const std::string& in, const std::string& out) {
    bitrec::ModelBundle bundle = bitrec::load_bundle(bundle_dir);
    bitrec::ImageTensor img = bitrec::io::load_image(in);
    img = bitrec::quantize(img, bundle.range.source_bits);
    bitrec::io::save_image(bitrec::recover(img, bundle), out);
    return kExitOk;
}

int cmd_eval(const std::string& bundle_dir, const std::string& manifest_path,
             const std::string& report_path) {
    bitrec::ModelBundle bundle = bitrec::load_bundle(bundle_dir);
    auto manifest = bitrec::io::load_manifest(manifest_path);
    auto images = bitrec::io::load_manifest_images(manifest, "test");
    if (images.empty()) images = bitrec::io::load_manifest_images(manifest);
    bitrec::MetricsReport report = bitrec::evaluate(images, bundle, true);

    std::ofstream f(report_path);
    if (!f) throw bitrec::io_error("cannot write report: " + report_path);
    if (report_path.size() >= 4 && report_path.substr(report_path.size() - 4) == ".csv")
        f << report.to_csv();
    else
        f << report.to_json().dump(2) << "\n";
    std::cout << "mean psnr " << report.mean_psnr << " dB, mean ssim " << report.mean_ssim
              << " over " << report.rows.size() << " images\n";
    return kExitOk;
}

int cmd_gradcheck() {
    bool all_pass = true;
    for (const auto& r : bitrec::nn::run_gradcheck_suite()) {
        const bool ok = r.pass();
        all_pass = all_pass && ok;
        std::cout << (ok ? "PASS" : "FAIL") << "  " << r.component << "  max_rel_err "
                  << r.max_rel_error << " (tol " << r.tolerance << ")\n";
    }
    return all_pass ? kExitOk : 1;
}

int cmd_synth(int count, int size, int bits, std::uint64_t seed, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto corpus = bitrec::generate_synthetic(count, size, bits, seed);
    nlohmann::json manifest{{"container_bits", bits}, {"images", nlohmann::json::array()}};
    for (int i = 0; i < count; ++i) {
        const std::string name = "synth_" + std::to_string(i) + ".ppm";
        bitrec::io::save_image(corpus[i], (std::filesystem::path(out_dir) / name).string());
        manifest["images"].push_back({{"path", name}});
    }
    std::ofstream f((std::filesystem::path(out_dir) / "manifest.json").string());
    f << manifest.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bitrec: bitplane-wise bit-depth recovery toolkit"};
    app.require_subcommand(1);

    int bits = 4;
    std::string in_path, out_path, method = "zp", bundle_dir, config_path, manifest_path,
                report_path;
    int count = 8, size = 64, synth_bits = 16;
    std::uint64_t seed = 1;

    auto* quantize_cmd = app.add_subcommand("quantize", "quantize an image to q bits");
    quantize_cmd->add_option("--bits", bits, "target effective bits q")->required();
    quantize_cmd->add_option("input", in_path)->required();
    quantize_cmd->add_option("output", out_path)->required();

    auto* baseline_cmd = app.add_subcommand("baseline", "classical de-quantization");
    baseline_cmd->add_option("--method", method, "zp|mig|br")->required();
    baseline_cmd->add_option("--from", bits, "effective bits q of the input")->required();
    baseline_cmd->add_option("input", in_path)->required();
    baseline_cmd->add_option("output", out_path)->required();

    auto* train_cmd = app.add_subcommand("train", "train a bitplane network bundle");
    train_cmd->add_option("--config", config_path, "key = value config file")->required();
    train_cmd->add_option("--out", bundle_dir, "bundle output directory")->required();

    auto* recover_cmd = app.add_subcommand("recover", "recover bit depth with a trained bundle");
    recover_cmd->add_option("--bundle", bundle_dir)->required();
    recover_cmd->add_option("input", in_path)->required();
    recover_cmd->add_option("output", out_path)->required();

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a bundle over a manifest");
    eval_cmd->add_option("--bundle", bundle_dir)->required();
    eval_cmd->add_option("--manifest", manifest_path)->required();
    eval_cmd->add_option("--report", report_path, "output .json or .csv")->required();

    app.add_subcommand("gradcheck", "run the finite-difference gradient suite");

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
    synth_cmd->add_option("--count", count)->required();
    synth_cmd->add_option("--size", size)->required();
    synth_cmd->add_option("--bits", synth_bits)->required();
    synth_cmd->add_option("--seed", seed)->required();
    synth_cmd->add_option("--out-dir", out_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (quantize_cmd->parsed()) return cmd_quantize(bits, in_path, out_path);
        if (baseline_cmd->parsed()) return cmd_baseline(method, bits, in_path, out_path);
        if (train_cmd->parsed()) return cmd_train(config_path, bundle_dir);
        if (recover_cmd->parsed()) return cmd_recover(bundle_dir, in_path, out_path);
        if (eval_cmd->parsed()) return cmd_eval(bundle_dir, manifest_path, report_path);
        if (app.get_subcommand("gradcheck")->parsed()) return cmd_gradcheck();
        if (synth_cmd->parsed()) return cmd_synth(count, size, synth_bits, seed, out_path);
    } catch (const bitrec::contract_violation& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return kExitContract;
    } catch (const bitrec::format_error& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return kExitData;
    } catch (const bitrec::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitData;
    } catch (const bitrec::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
