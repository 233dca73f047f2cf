// SPDX-License-Identifier: Apache-2.0
#include "psnn/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "psnn/errors.hpp"

namespace psnn {

namespace {

using nlohmann::json;

// Shortest round-trip formatting so staged and in-process reports compare
// bit-for-bit.
std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

constexpr const char* kFpsDefinition = "fps = 1 / total_latency_s (single image, batch 1)";
constexpr const char* kFpsPerWattDefinition =
    "fps_per_watt = fps / avg_power_w, avg_power_w = total_energy_j / total_latency_s";
constexpr const char* kEpbDefinition =
    "epb = total_energy_j / bits_processed; bits_processed sums, per pass, "
    "active_lanes * (dense_bits + sparse_bits) plus 16 ADC output bits";

} // namespace

std::string report_to_text(const SimReport& r) {
    std::ostringstream os;
    os << "model: " << r.model << "\n";
    os << "arch: n=" << r.arch.conv_width << " m=" << r.arch.fc_width
       << " N=" << r.arch.conv_units << " K=" << r.arch.fc_units << "\n";
    os << "quantization: " << r.weight_bits << "-bit weights, " << r.activation_bits
       << "-bit activations" << (r.exact_mode ? " (exact mode, quantization bypassed)" : "")
       << "\n";
    os << "definitions:\n";
    os << "  " << kFpsDefinition << "\n";
    os << "  " << kFpsPerWattDefinition << "\n";
    os << "  " << kEpbDefinition << "\n";
    os << "layers:\n";
    char line[256];
    std::snprintf(line, sizeof(line), "  %-5s %-16s %12s %12s %14s %14s\n", "idx", "kind",
                  "passes", "gated", "energy_j", "latency_s");
    os << line;
    for (const LayerRecord& l : r.layers) {
        std::snprintf(line, sizeof(line), "  %-5zu %-16s %12" PRIu64 " %12" PRIu64 " %14.6e %14.6e\n",
                      l.layer_index, l.kind.c_str(), l.passes, l.gated_lanes, l.energy_j,
                      l.latency_s);
        os << line;
    }
    os << "totals:\n";
    os << "  passes:         " << r.total_passes << "\n";
    os << "  gated lanes:    " << r.total_gated << "\n";
    os << "  active lanes:   " << r.total_active << "\n";
    os << "  bits processed: " << r.bits_processed << "\n";
    os << "  energy:         " << fmt_double(r.total_energy_j) << " J\n";
    os << "  latency:        " << fmt_double(r.total_latency_s) << " s\n";
    os << "metrics:\n";
    os << "  fps:          " << fmt_double(r.fps) << "\n";
    os << "  avg_power_w:  " << fmt_double(r.avg_power_w) << "\n";
    os << "  fps_per_watt: " << fmt_double(r.fps_per_watt) << "\n";
    os << "  epb:          " << fmt_double(r.epb) << " J/bit\n";
    return os.str();
}

std::string report_to_json(const SimReport& r) {
    json j;
    j["schema"] = 1;
    j["model"] = r.model;
    j["arch"] = {{"n", r.arch.conv_width},
                 {"m", r.arch.fc_width},
                 {"N", r.arch.conv_units},
                 {"K", r.arch.fc_units}};
    j["weight_bits"] = r.weight_bits;
    j["activation_bits"] = r.activation_bits;
    j["exact_mode"] = r.exact_mode;
    j["definitions"] = {kFpsDefinition, kFpsPerWattDefinition, kEpbDefinition};

    json layers = json::array();
    for (const LayerRecord& l : r.layers) {
        layers.push_back({{"layer", l.layer_index},
                          {"kind", l.kind},
                          {"photonic", l.photonic},
                          {"passes", l.passes},
                          {"gated", l.gated_lanes},
                          {"active", l.active_lanes},
                          {"bits", l.bits},
                          {"energy_j", l.energy_j},
                          {"latency_s", l.latency_s}});
    }
    j["layers"] = std::move(layers);
    j["totals"] = {{"passes", r.total_passes},
                   {"gated", r.total_gated},
                   {"active", r.total_active},
                   {"bits_processed", r.bits_processed},
                   {"energy_j", r.total_energy_j},
                   {"latency_s", r.total_latency_s}};
    j["metrics"] = {{"fps", r.fps},
                    {"avg_power_w", r.avg_power_w},
                    {"fps_per_watt", r.fps_per_watt},
                    {"epb", r.epb}};
    return j.dump(2) + "\n";
}

SimReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError("malformed report JSON: " + std::string(e.what()));
    }
    try {
        if (j.at("schema").get<int>() != 1) throw IoError("unsupported report schema");
        SimReport r;
        r.model = j.at("model").get<std::string>();
        r.arch.conv_width = j.at("arch").at("n").get<int>();
        r.arch.fc_width = j.at("arch").at("m").get<int>();
        r.arch.conv_units = j.at("arch").at("N").get<int>();
        r.arch.fc_units = j.at("arch").at("K").get<int>();
        r.weight_bits = j.at("weight_bits").get<int>();
        r.activation_bits = j.at("activation_bits").get<int>();
        r.exact_mode = j.at("exact_mode").get<bool>();
        for (const json& lj : j.at("layers")) {
            LayerRecord l;
            l.layer_index = lj.at("layer").get<size_t>();
            l.kind = lj.at("kind").get<std::string>();
            l.photonic = lj.at("photonic").get<bool>();
            l.passes = lj.at("passes").get<uint64_t>();
            l.gated_lanes = lj.at("gated").get<uint64_t>();
            l.active_lanes = lj.at("active").get<uint64_t>();
            l.bits = lj.at("bits").get<uint64_t>();
            l.energy_j = lj.at("energy_j").get<double>();
            l.latency_s = lj.at("latency_s").get<double>();
            r.layers.push_back(std::move(l));
        }
        r.finalize();
        return r;
    } catch (const json::exception& e) {
        throw IoError("malformed report JSON: " + std::string(e.what()));
    }
}

std::string report_to_csv(const SimReport& r) {
    std::ostringstream os;
    os << "layer,passes,gated,energy_j,latency_s\n";
    for (const LayerRecord& l : r.layers) {
        os << l.layer_index << "," << l.passes << "," << l.gated_lanes << ","
           << fmt_double(l.energy_j) << "," << fmt_double(l.latency_s) << "\n";
    }
    return os.str();
}

} // namespace psnn
