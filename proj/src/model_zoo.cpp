// SPDX-License-Identifier: Apache-2.0
#include "psnn/model_zoo.hpp"

#include <fstream>

#include <json.hpp>

#include "psnn/errors.hpp"

namespace psnn {

uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform_unit(uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

Tensor random_tensor(std::vector<int64_t> shape, uint64_t seed, double lo, double hi) {
    uint64_t state = seed;
    const int64_t volume = shape_volume(shape);
    std::vector<double> values(static_cast<size_t>(volume));
    for (double& v : values) {
        const double raw = lo + uniform_unit(state) * (hi - lo);
        v = static_cast<double>(static_cast<float>(raw)); // container precision
    }
    return Tensor(std::move(shape), std::move(values));
}

Tensor synthetic_input(const std::vector<int64_t>& shape, uint64_t seed) {
    return random_tensor(shape, seed ^ 0xa5a5a5a5ULL, 0.0, 1.0);
}

namespace {

struct Builder {
    ModelIR model;
    uint64_t state;

    explicit Builder(std::string name, std::vector<int64_t> input, uint64_t seed)
        : state(seed) {
        model.name = std::move(name);
        model.input_shape = std::move(input);
    }

    void conv(int64_t out_ch, int64_t in_ch, int64_t k, int64_t stride, int64_t pad) {
        const std::string w = "conv" + std::to_string(model.layers.size()) + ".w";
        model.tensors.emplace(w, random_tensor({out_ch, in_ch, k, k}, splitmix64(state)));
        model.layers.push_back(LayerSpec::conv2d(out_ch, in_ch, k, k, stride, pad, w));
    }
    void fc(int64_t out, int64_t in, bool bias = false) {
        const std::string w = "fc" + std::to_string(model.layers.size()) + ".w";
        model.tensors.emplace(w, random_tensor({out, in}, splitmix64(state)));
        std::string b;
        if (bias) {
            b = "fc" + std::to_string(model.layers.size()) + ".b";
            model.tensors.emplace(b, random_tensor({out}, splitmix64(state)));
        }
        model.layers.push_back(LayerSpec::fully_connected(out, in, w, b));
    }
    void bn(int64_t channels) {
        const std::string s = "bn" + std::to_string(model.layers.size()) + ".scale";
        const std::string h = "bn" + std::to_string(model.layers.size()) + ".shift";
        model.tensors.emplace(s, random_tensor({channels}, splitmix64(state), 0.5, 1.5));
        model.tensors.emplace(h, random_tensor({channels}, splitmix64(state), -0.1, 0.1));
        model.layers.push_back(LayerSpec::batch_norm(s, h));
    }
    void relu() { model.layers.push_back(LayerSpec::relu()); }
    void pool(int64_t window, int64_t stride) {
        model.layers.push_back(LayerSpec::max_pool(window, stride));
    }

    ModelIR finish() {
        model.validate();
        return std::move(model);
    }
};

} // namespace

ModelIR make_mnist_like(uint64_t seed) {
    Builder b("mnist-like", {1, 28, 28}, seed);
    b.conv(30, 1, 3, 1, 1);   //    270 weights
    b.relu();
    b.pool(2, 2);             // 28 -> 14
    b.conv(30, 30, 3, 1, 1);  //  8,100
    b.relu();
    b.pool(2, 2);             // 14 -> 7
    b.fc(1007, 30 * 7 * 7);   // 1,480,290
    b.relu();
    b.fc(10, 1007);           // 10,070 ; total 1,498,730
    return b.finish();
}

ModelIR make_cifar10_like(uint64_t seed) {
    Builder b("cifar10-like", {3, 32, 32}, seed);
    b.conv(18, 3, 3, 1, 1);    //     486
    b.relu();
    b.conv(28, 18, 3, 1, 1);   //   4,536
    b.relu();
    b.pool(2, 2);              // 32 -> 16
    b.conv(46, 28, 3, 1, 1);   //  11,592
    b.relu();
    b.conv(90, 46, 3, 1, 1);   //  37,260
    b.relu();
    b.pool(2, 2);              // 16 -> 8
    b.conv(150, 90, 3, 1, 1);  // 121,500
    b.relu();
    b.conv(250, 150, 3, 1, 1); // 337,500
    b.relu();
    b.pool(2, 2);              // 8 -> 4
    b.fc(10, 250 * 4 * 4);     //  40,000 ; total 552,874
    return b.finish();
}

ModelIR make_svhn_like(uint64_t seed) {
    Builder b("svhn-like", {3, 32, 32}, seed);
    b.conv(10, 3, 3, 1, 1);  //     270
    b.relu();
    b.conv(12, 10, 3, 1, 1); //   1,080
    b.relu();
    b.pool(2, 2);            // 32 -> 16
    b.conv(22, 12, 3, 1, 1); //   2,376
    b.relu();
    b.conv(36, 22, 3, 1, 1); //   7,128
    b.relu();
    b.pool(2, 2);            // 16 -> 8
    b.fc(216, 36 * 8 * 8);   // 497,664
    b.relu();
    b.fc(194, 216);          //  41,904
    b.relu();
    b.fc(10, 194);           //   1,940 ; total 552,362
    return b.finish();
}

ModelIR make_toy_cnn(uint64_t seed) {
    Builder b("toy-cnn", {2, 12, 12}, seed);
    b.conv(4, 2, 3, 1, 1);
    b.bn(4);
    b.relu();
    b.conv(6, 4, 3, 1, 0); // 12 -> 10
    b.relu();
    b.pool(2, 2);          // 10 -> 5
    b.conv(8, 6, 3, 1, 1);
    b.relu();
    b.fc(20, 8 * 5 * 5, true);
    b.relu();
    b.fc(10, 20, true);
    return b.finish();
}

ModelIR make_toy_fc(uint64_t seed) {
    Builder b("toy-fc", {32}, seed);
    b.fc(24, 32);
    b.relu();
    b.fc(10, 24);
    return b.finish();
}

ModelIR make_preset(const std::string& preset, uint64_t seed) {
    if (preset == "mnist") return make_mnist_like(seed);
    if (preset == "cifar10") return make_cifar10_like(seed);
    if (preset == "svhn") return make_svhn_like(seed);
    if (preset == "toy-cnn") return make_toy_cnn(seed);
    if (preset == "toy-fc") return make_toy_fc(seed);
    throw ConfigError("unknown model preset: " + preset);
}

Tensor load_tensor_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open tensor file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
        Tensor t(j.at("shape").get<std::vector<int64_t>>(),
                 j.at("values").get<std::vector<double>>());
        t.validate();
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed tensor file: " + std::string(e.what()));
    }
}

void save_tensor_json(const Tensor& t, const std::filesystem::path& path) {
    t.validate();
    nlohmann::json j;
    j["shape"] = t.shape();
    j["values"] = std::vector<double>(t.data().begin(), t.data().end());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write tensor file: " + path.string());
    out << j.dump() << "\n";
    if (!out) throw IoError("tensor file write failed");
}

} // namespace psnn
