// SPDX-License-Identifier: Apache-2.0
#include "psnn/model_io.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "psnn/errors.hpp"

namespace psnn {

namespace {

using nlohmann::json;

void encode_f32_le(float v, unsigned char out[4]) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    out[0] = static_cast<unsigned char>(bits & 0xff);
    out[1] = static_cast<unsigned char>((bits >> 8) & 0xff);
    out[2] = static_cast<unsigned char>((bits >> 16) & 0xff);
    out[3] = static_cast<unsigned char>((bits >> 24) & 0xff);
}

float decode_f32_le(const unsigned char in[4]) {
    const uint32_t bits = static_cast<uint32_t>(in[0]) | (static_cast<uint32_t>(in[1]) << 8) |
                          (static_cast<uint32_t>(in[2]) << 16) |
                          (static_cast<uint32_t>(in[3]) << 24);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

json layer_to_json(const LayerSpec& l) {
    json j;
    j["kind"] = layer_kind_name(l.kind);
    switch (l.kind) {
        case LayerKind::Conv2D:
            j["out_channels"] = l.out_channels;
            j["in_channels"] = l.in_channels;
            j["kernel_h"] = l.kernel_h;
            j["kernel_w"] = l.kernel_w;
            j["stride"] = l.stride;
            j["padding"] = l.padding;
            j["weight"] = l.weight;
            if (!l.bias.empty()) j["bias"] = l.bias;
            break;
        case LayerKind::FullyConnected:
            j["out_dim"] = l.out_dim;
            j["in_dim"] = l.in_dim;
            j["weight"] = l.weight;
            if (!l.bias.empty()) j["bias"] = l.bias;
            break;
        case LayerKind::BatchNorm:
            j["scale"] = l.bn_scale;
            j["shift"] = l.bn_shift;
            break;
        case LayerKind::ReLU:
            break;
        case LayerKind::MaxPool:
            j["pool"] = l.pool;
            j["pool_stride"] = l.pool_stride;
            break;
    }
    return j;
}

LayerSpec layer_from_json(const json& j) {
    LayerSpec l;
    l.kind = layer_kind_from_name(j.at("kind").get<std::string>());
    switch (l.kind) {
        case LayerKind::Conv2D:
            l.out_channels = j.at("out_channels").get<int64_t>();
            l.in_channels = j.at("in_channels").get<int64_t>();
            l.kernel_h = j.at("kernel_h").get<int64_t>();
            l.kernel_w = j.at("kernel_w").get<int64_t>();
            l.stride = j.at("stride").get<int64_t>();
            l.padding = j.at("padding").get<int64_t>();
            l.weight = j.at("weight").get<std::string>();
            l.bias = j.value("bias", "");
            break;
        case LayerKind::FullyConnected:
            l.out_dim = j.at("out_dim").get<int64_t>();
            l.in_dim = j.at("in_dim").get<int64_t>();
            l.weight = j.at("weight").get<std::string>();
            l.bias = j.value("bias", "");
            break;
        case LayerKind::BatchNorm:
            l.bn_scale = j.at("scale").get<std::string>();
            l.bn_shift = j.at("shift").get<std::string>();
            break;
        case LayerKind::ReLU:
            break;
        case LayerKind::MaxPool:
            l.pool = j.at("pool").get<int64_t>();
            l.pool_stride = j.at("pool_stride").get<int64_t>();
            break;
    }
    return l;
}

} // namespace

void save_container(const StoredModel& stored, const std::filesystem::path& dir) {
    stored.model.validate();
    for (const auto& [idx, mask] : stored.masks) {
        if (idx >= stored.model.layers.size() ||
            !is_parameterized(stored.model.layers[idx].kind))
            throw ValidationError("mask attached to non-parameterized layer");
        const auto& w = stored.model.tensors.at(stored.model.layers[idx].weight);
        if (static_cast<int64_t>(mask.size()) != w.size())
            throw ValidationError("mask size does not match weight tensor");
    }

    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create container directory: " + dir.string());

    // Tensor order: model tensors in map order, then mask tensors.
    struct Entry {
        std::string name;
        std::vector<int64_t> shape;
        std::vector<double> values;
    };
    std::vector<Entry> entries;
    for (const auto& [name, t] : stored.model.tensors)
        entries.push_back({name, t.shape(), {t.data().begin(), t.data().end()}});
    for (const auto& [idx, mask] : stored.masks) {
        const LayerSpec& layer = stored.model.layers[idx];
        Entry e;
        e.name = layer.weight + ".mask";
        e.shape = stored.model.tensors.at(layer.weight).shape();
        e.values.assign(mask.begin(), mask.end());
        entries.push_back(std::move(e));
    }

    json manifest;
    manifest["format"] = "psnn-model";
    manifest["schema"] = 1;
    manifest["name"] = stored.model.name;
    manifest["input_shape"] = stored.model.input_shape;
    manifest["parameter_count"] = count_parameters(stored.model);

    json layers = json::array();
    for (size_t i = 0; i < stored.model.layers.size(); ++i) {
        json j = layer_to_json(stored.model.layers[i]);
        if (stored.masks.count(i)) j["mask"] = stored.model.layers[i].weight + ".mask";
        if (auto it = stored.codebooks.find(i); it != stored.codebooks.end())
            j["codebook"] = it->second;
        layers.push_back(std::move(j));
    }
    manifest["layers"] = std::move(layers);

    json tensor_table = json::array();
    std::vector<unsigned char> blob;
    for (const Entry& e : entries) {
        const uint64_t offset = blob.size();
        const uint64_t length = e.values.size() * 4;
        blob.resize(offset + length);
        for (size_t i = 0; i < e.values.size(); ++i)
            encode_f32_le(static_cast<float>(e.values[i]), &blob[offset + 4 * i]);
        tensor_table.push_back(
            {{"name", e.name}, {"shape", e.shape}, {"offset", offset}, {"length", length}});
    }
    manifest["tensors"] = std::move(tensor_table);

    {
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        if (!out) throw IoError("cannot write manifest: " + (dir / "manifest.json").string());
        out << manifest.dump(2) << "\n";
        if (!out) throw IoError("manifest write failed");
    }
    {
        std::ofstream out(dir / "tensors.bin", std::ios::binary);
        if (!out) throw IoError("cannot write blob: " + (dir / "tensors.bin").string());
        out.write(reinterpret_cast<const char*>(blob.data()),
                  static_cast<std::streamsize>(blob.size()));
        if (!out) throw IoError("blob write failed");
    }
}

StoredModel load_container(const std::filesystem::path& dir) {
    std::ifstream mf(dir / "manifest.json", std::ios::binary);
    if (!mf) throw IoError("cannot open manifest: " + (dir / "manifest.json").string());
    json manifest;
    try {
        mf >> manifest;
    } catch (const json::exception& e) {
        throw IoError("malformed manifest: " + std::string(e.what()));
    }

    std::ifstream bf(dir / "tensors.bin", std::ios::binary | std::ios::ate);
    if (!bf) throw IoError("cannot open blob: " + (dir / "tensors.bin").string());
    const uint64_t blob_size = static_cast<uint64_t>(bf.tellg());
    bf.seekg(0);
    std::vector<unsigned char> blob(blob_size);
    bf.read(reinterpret_cast<char*>(blob.data()), static_cast<std::streamsize>(blob_size));
    if (!bf) throw IoError("blob read failed");

    StoredModel stored;
    try {
        if (manifest.value("format", "") != "psnn-model")
            throw IoError("not a psnn model container");
        stored.model.name = manifest.at("name").get<std::string>();
        stored.model.input_shape = manifest.at("input_shape").get<std::vector<int64_t>>();

        std::map<std::string, Tensor> all_tensors;
        for (const json& tj : manifest.at("tensors")) {
            const auto name = tj.at("name").get<std::string>();
            const auto shape = tj.at("shape").get<std::vector<int64_t>>();
            const uint64_t offset = tj.at("offset").get<uint64_t>();
            const uint64_t length = tj.at("length").get<uint64_t>();
            const uint64_t volume = static_cast<uint64_t>(shape_volume(shape));
            if (length != volume * 4)
                throw IoError("tensor " + name + " length does not match its shape");
            if (offset + length > blob_size)
                throw IoError("tensor " + name + " is truncated: blob too short");
            std::vector<double> values(volume);
            for (uint64_t i = 0; i < volume; ++i)
                values[i] = static_cast<double>(decode_f32_le(&blob[offset + 4 * i]));
            all_tensors.emplace(name, Tensor(shape, std::move(values)));
        }

        for (size_t i = 0; i < manifest.at("layers").size(); ++i) {
            const json& lj = manifest.at("layers")[i];
            stored.model.layers.push_back(layer_from_json(lj));
            if (lj.contains("codebook"))
                stored.codebooks[i] = lj.at("codebook").get<std::vector<double>>();
            if (lj.contains("mask")) {
                const auto mask_name = lj.at("mask").get<std::string>();
                auto it = all_tensors.find(mask_name);
                if (it == all_tensors.end())
                    throw IoError("mask tensor missing: " + mask_name);
                std::vector<uint8_t> mask(it->second.size());
                for (int64_t k = 0; k < it->second.size(); ++k) {
                    const double v = it->second[k];
                    if (v != 0.0 && v != 1.0) throw IoError("mask tensor is not binary");
                    mask[static_cast<size_t>(k)] = v != 0.0;
                }
                stored.masks[i] = std::move(mask);
            }
        }

        // Keep only model tensors (masks were folded into stored.masks).
        for (auto& [name, t] : all_tensors) {
            if (name.size() > 5 && name.substr(name.size() - 5) == ".mask") continue;
            stored.model.tensors.emplace(name, std::move(t));
        }
    } catch (const json::exception& e) {
        throw IoError("malformed manifest: " + std::string(e.what()));
    }

    stored.model.validate();
    return stored;
}

void save_model(const ModelIR& model, const std::filesystem::path& dir) {
    save_container(StoredModel{model, {}, {}}, dir);
}

ModelIR load_model(const std::filesystem::path& dir) {
    return load_container(dir).model;
}

} // namespace psnn
