#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "spintomo/tomography.hpp"

namespace spintomo {

inline constexpr int kTomogramFormatVersion = 1;
inline constexpr const char* kOutcomeConvention = "0=-1/2,1=+1/2";

// Locale-independent formatting used for every numeric field this toolkit
// writes: 12 significant digits, '.' decimal separator.
inline std::string format_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
}

inline void write_tomogram(const Tomogram& tom, const std::string& path) {
    nlohmann::json j;
    j["format_version"] = kTomogramFormatVersion;
    j["n_qubits"] = tom.n_qubits;
    j["outcome_convention"] = kOutcomeConvention;
    nlohmann::json slices = nlohmann::json::array();
    for (const auto& [key, probs] : tom.slices) {
        slices.push_back({{"axes", key}, {"probs", probs}});
    }
    j["slices"] = std::move(slices);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_tomogram: cannot open " + path);
    out << j.dump(1) << "\n";
}

inline Tomogram read_tomogram(const std::string& path, double norm_tol = 1e-6) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_tomogram: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("read_tomogram: malformed file " + path + ": " + e.what());
    }
    try {
        if (j.at("format_version").get<int>() != kTomogramFormatVersion) {
            throw DataError("read_tomogram: unsupported format_version");
        }
        if (j.at("outcome_convention").get<std::string>() != kOutcomeConvention) {
            throw DataError("read_tomogram: unexpected outcome convention");
        }
        Tomogram tom;
        tom.n_qubits = j.at("n_qubits").get<int>();
        if (tom.n_qubits < 1 || tom.n_qubits > 3) throw DataError("read_tomogram: n_qubits out of range");
        for (const auto& rec : j.at("slices")) {
            tom.insert_slice(rec.at("axes").get<std::string>(), rec.at("probs").get<std::vector<double>>(), norm_tol);
        }
        if (tom.slices.empty()) throw DataError("read_tomogram: no slices");
        return tom;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("read_tomogram: malformed file " + path + ": " + e.what());
    }
}

// Flat export for plotting: axes,outcome,probability.
inline void write_tomogram_csv(const Tomogram& tom, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_tomogram_csv: cannot open " + path);
    out << "axes,outcome,probability\n";
    for (const auto& [key, probs] : tom.slices) {
        for (std::size_t idx = 0; idx < probs.size(); ++idx) {
            std::string bits;
            for (int q = 0; q < tom.n_qubits; ++q) {
                bits.push_back(((idx >> (tom.n_qubits - 1 - q)) & 1) ? '1' : '0');
            }
            out << key << ',' << bits << ',' << format_g12(probs[idx]) << "\n";
        }
    }
}

}  // namespace spintomo
