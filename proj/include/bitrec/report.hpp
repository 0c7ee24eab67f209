#pragma once

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bitrec/errors.hpp"

namespace bitrec {

// Evaluation output: per-image rows plus arithmetic-mean aggregates.
// Infinite PSNR (identical images) is serialized as the string "inf".
struct MetricsReport {
    struct Stage {
        int plane_index = 0;
        double psnr = 0.0;
        double ssim = 0.0;
    };
    struct Row {
        std::string id;
        double mse = 0.0;
        double psnr = 0.0;
        double ssim = 0.0;
        std::vector<Stage> stages; // accumulation series, MSB-first
        std::map<std::string, double> baseline_psnr;
        std::map<std::string, double> baseline_ssim;
    };

    int source_bits = 0;
    int container_bits = 0;
    std::string method;
    std::string ssim_mode = "per-channel-average";
    std::string inference_mode; // "binarized" or "raw-sigmoid"
    std::vector<Row> rows;

    double mean_mse = 0.0, mean_psnr = 0.0, mean_ssim = 0.0;

    void finalize() {
        mean_mse = mean_psnr = mean_ssim = 0.0;
        if (rows.empty()) return;
        for (const auto& r : rows) {
            mean_mse += r.mse;
            mean_psnr += r.psnr;
            mean_ssim += r.ssim;
        }
        mean_mse /= rows.size();
        mean_psnr /= rows.size();
        mean_ssim /= rows.size();
    }

    static nlohmann::json num(double v) {
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        return v;
    }

    nlohmann::json to_json() const {
        nlohmann::json j{{"q", source_bits},
                         {"N", container_bits},
                         {"method", method},
                         {"ssim_mode", ssim_mode},
                         {"inference_mode", inference_mode},
                         {"aggregate",
                          {{"mse", num(mean_mse)}, {"psnr", num(mean_psnr)}, {"ssim", num(mean_ssim)}}}};
        j["images"] = nlohmann::json::array();
        for (const auto& r : rows) {
            nlohmann::json row{{"id", r.id},
                               {"mse", num(r.mse)},
                               {"psnr", num(r.psnr)},
                               {"ssim", num(r.ssim)}};
            if (!r.stages.empty()) {
                row["stages"] = nlohmann::json::array();
                for (const auto& s : r.stages)
                    row["stages"].push_back(
                        {{"plane", s.plane_index}, {"psnr", num(s.psnr)}, {"ssim", num(s.ssim)}});
            }
            for (const auto& [name, v] : r.baseline_psnr) row["psnr_" + name] = num(v);
            for (const auto& [name, v] : r.baseline_ssim) row["ssim_" + name] = num(v);
            j["images"].push_back(std::move(row));
        }
        return j;
    }

    std::string to_csv() const {
        std::ostringstream out;
        out.precision(12);
        auto cell = [](double v) -> std::string {
            if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
            std::ostringstream s;
            s.precision(12);
            s << v;
            return s.str();
        };

        std::vector<std::string> baseline_names;
        std::size_t n_stages = 0;
        if (!rows.empty()) {
            for (const auto& [name, _] : rows.front().baseline_psnr) baseline_names.push_back(name);
            n_stages = rows.front().stages.size();
        }
        out << "id,mse,psnr,ssim";
        for (std::size_t k = 0; k < n_stages; ++k)
            out << ",stage" << k << "_plane,stage" << k << "_psnr,stage" << k << "_ssim";
        for (const auto& name : baseline_names) out << ",psnr_" << name << ",ssim_" << name;
        out << "\n";
        for (const auto& r : rows) {
            out << r.id << "," << cell(r.mse) << "," << cell(r.psnr) << "," << cell(r.ssim);
            for (const auto& s : r.stages)
                out << "," << s.plane_index << "," << cell(s.psnr) << "," << cell(s.ssim);
            for (const auto& name : baseline_names)
                out << "," << cell(r.baseline_psnr.at(name)) << ","
                    << cell(r.baseline_ssim.at(name));
            out << "\n";
        }
        out << "mean," << cell(mean_mse) << "," << cell(mean_psnr) << "," << cell(mean_ssim)
            << "\n";
        return out.str();
    }
};

} // namespace bitrec
