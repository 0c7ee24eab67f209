#pragma once

#include <filesystem>
#include <set>

#include <json.hpp>

#include "bitrec/io/png_io.hpp"
#include "bitrec/io/pnm.hpp"

namespace bitrec {
namespace io {

namespace detail {

inline std::string lower_ext(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(c));
    return ext;
}

inline std::string sidecar_path(const std::string& path) { return path + ".meta.json"; }

} // namespace detail

// Dispatches on extension. A `<path>.meta.json` sidecar restores
// non-{8,16} container depths that were left-shifted into 16 bits.
inline ImageTensor load_image(const std::string& path) {
    const std::string ext = detail::lower_ext(path);
    ImageTensor img;
    if (ext == ".png")
        img = load_png(path);
    else if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm")
        img = load_pnm(path);
    else
        throw format_error("unsupported image extension '" + ext + "' (need .png/.pgm/.ppm)");

    const std::string sidecar = detail::sidecar_path(path);
    if (std::filesystem::exists(sidecar)) {
        std::ifstream f(sidecar);
        nlohmann::json meta = nlohmann::json::parse(f, nullptr, false);
        if (meta.is_discarded()) throw format_error("malformed sidecar JSON: " + sidecar);
        const int n = meta.at("container_bits").get<int>();
        const int shift = meta.at("shift").get<int>();
        if (n < 2 || n > 16 || shift != 16 - n)
            throw format_error("inconsistent sidecar metadata: " + sidecar);
        for (auto& c : img.codes) c = static_cast<std::uint16_t>(c >> shift);
        img.container_bits = n;
        img.effective_bits = n;
    }
    return img;
}

inline void save_image(const ImageTensor& img, const std::string& path) {
    ImageTensor out = img;
    if (img.container_bits != 8 && img.container_bits != 16) {
        const int shift = 16 - img.container_bits;
        for (auto& c : out.codes) c = static_cast<std::uint16_t>(c << shift);
        out.container_bits = 16;
        out.effective_bits = 16;
        std::ofstream f(detail::sidecar_path(path));
        if (!f) throw io_error("cannot write sidecar for: " + path);
        f << nlohmann::json{{"container_bits", img.container_bits}, {"shift", shift}}.dump(2)
          << "\n";
    }
    const std::string ext = detail::lower_ext(path);
    if (ext == ".png")
        save_png(out, path);
    else if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm")
        save_pnm(out, path);
    else
        throw format_error("unsupported image extension '" + ext + "' (need .png/.pgm/.ppm)");
}

struct DatasetManifest {
    int container_bits = 8;
    struct Entry {
        std::string path;
        std::string split; // "" when unlabelled
    };
    std::vector<Entry> images;
};

// Manifest JSON: {"container_bits": 8, "images": [{"path": ..., "split": ...}]}.
// Paths are resolved relative to the manifest file.
inline DatasetManifest load_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open manifest: " + path);
    nlohmann::json j = nlohmann::json::parse(f, nullptr, false);
    if (j.is_discarded()) throw format_error("malformed manifest JSON: " + path);

    DatasetManifest m;
    m.container_bits = j.at("container_bits").get<int>();
    const auto base = std::filesystem::path(path).parent_path();
    std::set<std::string> seen;
    for (const auto& e : j.at("images")) {
        DatasetManifest::Entry entry;
        entry.path = (base / e.at("path").get<std::string>()).string();
        if (e.contains("split")) entry.split = e.at("split").get<std::string>();
        if (!seen.insert(entry.path).second)
            throw format_error("duplicate manifest entry: " + entry.path);
        if (!std::filesystem::exists(entry.path))
            throw format_error("manifest references missing file: " + entry.path);
        m.images.push_back(std::move(entry));
    }
    return m;
}

inline std::vector<ImageTensor> load_manifest_images(const DatasetManifest& m,
                                                     const std::string& split = "") {
    std::vector<ImageTensor> out;
    for (const auto& e : m.images) {
        if (!split.empty() && e.split != split) continue;
        ImageTensor img = load_image(e.path);
        if (img.container_bits != m.container_bits)
            throw format_error("image " + e.path + " has container_bits " +
                               std::to_string(img.container_bits) + ", manifest declares " +
                               std::to_string(m.container_bits));
        out.push_back(std::move(img));
    }
    return out;
}

} // namespace io
} // namespace bitrec
