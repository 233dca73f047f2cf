// SPDX-License-Identifier: Apache-2.0
#include "psnn/config.hpp"

#include <fstream>
#include <sstream>

#include "psnn/errors.hpp"

namespace psnn {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for " + key + ": '" + value + "'");
    }
}

std::vector<std::string> parse_list(const std::string& key, const std::string& value) {
    if (value.size() < 2 || value.front() != '[' || value.back() != ']')
        throw ConfigError("expected [a, b, ...] list for " + key);
    std::vector<std::string> items;
    std::string inner = value.substr(1, value.size() - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

// "all" or colon-separated layer indices like "0:2:4".
std::vector<size_t> parse_subset(const std::string& key, const std::string& token) {
    if (token == "all") return {};
    std::vector<size_t> layers;
    std::stringstream ss(token);
    std::string part;
    while (std::getline(ss, part, ':')) {
        part = trim(part);
        if (part.empty()) continue;
        layers.push_back(static_cast<size_t>(parse_int(key, part)));
    }
    if (layers.empty()) throw ConfigError("empty layer subset for " + key);
    return layers;
}

} // namespace

VduConfig parse_arch_spec(const std::string& spec) {
    VduConfig cfg;
    int fields[4] = {0, 0, 0, 0};
    std::stringstream ss(spec);
    std::string part;
    int i = 0;
    while (std::getline(ss, part, 'x')) {
        if (i >= 4) throw ConfigError("bad arch spec (want nxmxNxK): '" + spec + "'");
        fields[i++] = parse_int("arch", trim(part));
    }
    if (i != 4) throw ConfigError("bad arch spec (want nxmxNxK): '" + spec + "'");
    cfg.conv_width = fields[0];
    cfg.fc_width = fields[1];
    cfg.conv_units = fields[2];
    cfg.fc_units = fields[3];
    cfg.validate();
    return cfg;
}

SparsityPlan RunConfig::sparsity_plan(const ModelIR& model) const {
    SparsityPlan plan;
    if (uniform_sparsity) plan = SparsityPlan::uniform(model, *uniform_sparsity);
    for (const auto& [idx, s] : layer_sparsity) plan.entries[idx] = s;
    return plan;
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::stringstream lines(text);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        auto rate = [&](DeviceRate& r, const char* lat_key, double lat_unit,
                        const char* pow_key, double pow_unit) {
            if (key == lat_key) { r.latency_s = parse_double(key, value) * lat_unit; return true; }
            if (key == pow_key) { r.power_w = parse_double(key, value) * pow_unit; return true; }
            return false;
        };

        if (rate(cfg.device.eo_tuning, "device.eo_tuning.latency_ns", 1e-9,
                 "device.eo_tuning.power_uw_per_nm", 1e-6)) continue;
        if (rate(cfg.device.to_tuning, "device.to_tuning.latency_us", 1e-6,
                 "device.to_tuning.power_mw_per_fsr", 1e-3)) continue;
        if (rate(cfg.device.vcsel, "device.vcsel.latency_ns", 1e-9,
                 "device.vcsel.power_mw", 1e-3)) continue;
        if (rate(cfg.device.photodetector, "device.photodetector.latency_ps", 1e-12,
                 "device.photodetector.power_mw", 1e-3)) continue;
        if (rate(cfg.device.dac16, "device.dac16.latency_ns", 1e-9,
                 "device.dac16.power_mw", 1e-3)) continue;
        if (rate(cfg.device.dac6, "device.dac6.latency_ns", 1e-9,
                 "device.dac6.power_mw", 1e-3)) continue;
        if (rate(cfg.device.adc16, "device.adc16.latency_ns", 1e-9,
                 "device.adc16.power_mw", 1e-3)) continue;

        if (key == "device.to_power_scale") {
            cfg.device.to_power_scale = parse_double(key, value);
        } else if (key == "device.eo_shift_nm") {
            cfg.device.eo_shift_nm = parse_double(key, value);
        } else if (key == "arch.n") {
            cfg.arch.conv_width = parse_int(key, value);
        } else if (key == "arch.m") {
            cfg.arch.fc_width = parse_int(key, value);
        } else if (key == "arch.N") {
            cfg.arch.conv_units = parse_int(key, value);
        } else if (key == "arch.K") {
            cfg.arch.fc_units = parse_int(key, value);
        } else if (key == "sparsity") {
            cfg.uniform_sparsity = parse_double(key, value);
        } else if (key == "clusters") {
            cfg.clusters = parse_int(key, value);
        } else if (key.rfind("layer.", 0) == 0 &&
                   key.size() > 15 && key.substr(key.size() - 9) == ".sparsity") {
            const std::string idx_str = key.substr(6, key.size() - 15);
            cfg.layer_sparsity[static_cast<size_t>(parse_int(key, idx_str))] =
                parse_double(key, value);
        } else if (key == "explore.sparsity") {
            cfg.grid.sparsities.clear();
            for (const auto& item : parse_list(key, value))
                cfg.grid.sparsities.push_back(parse_double(key, item));
        } else if (key == "explore.clusters") {
            cfg.grid.cluster_counts.clear();
            for (const auto& item : parse_list(key, value))
                cfg.grid.cluster_counts.push_back(parse_int(key, item));
        } else if (key == "explore.arch") {
            cfg.grid.arch_configs.clear();
            for (const auto& item : parse_list(key, value))
                cfg.grid.arch_configs.push_back(parse_arch_spec(item));
        } else if (key == "explore.layer_subsets") {
            cfg.grid.layer_subsets.clear();
            for (const auto& item : parse_list(key, value))
                cfg.grid.layer_subsets.push_back(parse_subset(key, item));
        } else if (key == "explore.objective") {
            cfg.grid.objective = objective_from_name(value);
        } else if (key == "explore.eval_count") {
            cfg.eval_count = static_cast<size_t>(parse_int(key, value));
        } else {
            throw ConfigError("unknown config key: " + key);
        }
    }
    cfg.device.validate();
    cfg.arch.validate();
    return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace psnn
