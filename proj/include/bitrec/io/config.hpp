#pragma once

#include <fstream>
#include <sstream>

#include "bitrec/pipeline.hpp"

namespace bitrec {
namespace io {

// Training job description: TrainConfig fields plus the recovery range
// and a data source (manifest file or synthetic generator parameters).
struct TrainJob {
    TrainConfig config;
    int source_bits = 4;  // q
    int target_bits = 8;  // N
    int channels = 3;
    std::string manifest; // empty -> synthetic corpus
    int synth_count = 32;
    int synth_size = 64;
    std::uint64_t synth_seed = 1;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw format_error("config: bad boolean for '" + key + "': " + v);
}

} // namespace detail

// Flat `key = value` lines; '#' comments and blank lines ignored.
inline TrainJob parse_train_config(std::istream& in) {
    TrainJob job;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw format_error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        try {
            auto& c = job.config;
            if (key == "patch_size") c.patch_size = std::stoi(val);
            else if (key == "batch_size") c.batch_size = std::stoi(val);
            else if (key == "lr") c.lr = std::stod(val);
            else if (key == "beta1") c.beta1 = std::stod(val);
            else if (key == "beta2") c.beta2 = std::stod(val);
            else if (key == "epochs") c.epochs = std::stoi(val);
            else if (key == "lr_drop_epoch") c.lr_drop_epoch = std::stoi(val);
            else if (key == "lr_drop_factor") c.lr_drop_factor = std::stod(val);
            else if (key == "augment") c.augment = detail::parse_bool(val, key);
            else if (key == "seed") c.seed = std::stoull(val);
            else if (key == "binarize_at_inference")
                c.binarize_at_inference = detail::parse_bool(val, key);
            else if (key == "depth" || key == "D") c.depth = std::stoi(val);
            else if (key == "loss") {
                if (val == "bce") c.loss = LossKind::bce;
                else if (val == "mse") c.loss = LossKind::mse;
                else throw format_error("config: loss must be bce or mse, got " + val);
            } else if (key == "target") {
                if (val == "bitplane") c.target = TargetKind::bitplane;
                else if (val == "next_image") c.target = TargetKind::next_image;
                else throw format_error("config: target must be bitplane or next_image, got " + val);
            } else if (key == "mode") {
                if (val == "bitplanewise") c.mode = TrainMode::bitplanewise;
                else if (val == "single_shot") c.mode = TrainMode::single_shot;
                else throw format_error("config: mode must be bitplanewise or single_shot, got " + val);
            }
            else if (key == "q") job.source_bits = std::stoi(val);
            else if (key == "n" || key == "N") job.target_bits = std::stoi(val);
            else if (key == "channels") job.channels = std::stoi(val);
            else if (key == "manifest") job.manifest = val;
            else if (key == "synth_count") job.synth_count = std::stoi(val);
            else if (key == "synth_size") job.synth_size = std::stoi(val);
            else if (key == "synth_seed") job.synth_seed = std::stoull(val);
            else throw format_error("config: unknown key '" + key + "'");
        } catch (const format_error&) {
            throw;
        } catch (const std::exception&) {
            throw format_error("config line " + std::to_string(lineno) + ": bad value for '" +
                               key + "': " + val);
        }
    }
    return job;
}

inline TrainJob load_train_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open config: " + path);
    return parse_train_config(f);
}

} // namespace io
} // namespace bitrec
