// SPDX-License-Identifier: Apache-2.0
#include "psnn/model.hpp"

#include <set>

#include "psnn/errors.hpp"

namespace psnn {

const char* layer_kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Conv2D: return "conv2d";
        case LayerKind::FullyConnected: return "fully_connected";
        case LayerKind::BatchNorm: return "batch_norm";
        case LayerKind::ReLU: return "relu";
        case LayerKind::MaxPool: return "max_pool";
    }
    return "?";
}

LayerKind layer_kind_from_name(const std::string& name) {
    if (name == "conv2d") return LayerKind::Conv2D;
    if (name == "fully_connected") return LayerKind::FullyConnected;
    if (name == "batch_norm") return LayerKind::BatchNorm;
    if (name == "relu") return LayerKind::ReLU;
    if (name == "max_pool") return LayerKind::MaxPool;
    throw ValidationError("unknown layer kind: " + name);
}

bool is_parameterized(LayerKind k) {
    return k == LayerKind::Conv2D || k == LayerKind::FullyConnected;
}

std::vector<int64_t> LayerSpec::weight_shape() const {
    if (kind == LayerKind::Conv2D) return {out_channels, in_channels, kernel_h, kernel_w};
    if (kind == LayerKind::FullyConnected) return {out_dim, in_dim};
    return {};
}

LayerSpec LayerSpec::conv2d(int64_t out_ch, int64_t in_ch, int64_t kh, int64_t kw,
                            int64_t stride, int64_t padding, std::string weight,
                            std::string bias) {
    LayerSpec l;
    l.kind = LayerKind::Conv2D;
    l.out_channels = out_ch;
    l.in_channels = in_ch;
    l.kernel_h = kh;
    l.kernel_w = kw;
    l.stride = stride;
    l.padding = padding;
    l.weight = std::move(weight);
    l.bias = std::move(bias);
    return l;
}

LayerSpec LayerSpec::fully_connected(int64_t out, int64_t in, std::string weight,
                                     std::string bias) {
    LayerSpec l;
    l.kind = LayerKind::FullyConnected;
    l.out_dim = out;
    l.in_dim = in;
    l.weight = std::move(weight);
    l.bias = std::move(bias);
    return l;
}

LayerSpec LayerSpec::batch_norm(std::string scale, std::string shift) {
    LayerSpec l;
    l.kind = LayerKind::BatchNorm;
    l.bn_scale = std::move(scale);
    l.bn_shift = std::move(shift);
    return l;
}

LayerSpec LayerSpec::relu() {
    LayerSpec l;
    l.kind = LayerKind::ReLU;
    return l;
}

LayerSpec LayerSpec::max_pool(int64_t window, int64_t stride) {
    LayerSpec l;
    l.kind = LayerKind::MaxPool;
    l.pool = window;
    l.pool_stride = stride;
    return l;
}

std::vector<int64_t> layer_output_shape(const LayerSpec& layer, const std::vector<int64_t>& in) {
    switch (layer.kind) {
        case LayerKind::Conv2D: {
            if (in.size() != 3) throw ValidationError("conv2d expects (C,H,W) input");
            auto [c, h, w] = std::tuple{in[0], in[1], in[2]};
            if (c != layer.in_channels)
                throw ValidationError("conv2d input channel mismatch");
            int64_t oh = (h + 2 * layer.padding - layer.kernel_h) / layer.stride + 1;
            int64_t ow = (w + 2 * layer.padding - layer.kernel_w) / layer.stride + 1;
            if (oh <= 0 || ow <= 0) throw ValidationError("conv2d output collapses to zero");
            return {layer.out_channels, oh, ow};
        }
        case LayerKind::FullyConnected: {
            if (shape_volume(in) != layer.in_dim)
                throw ValidationError("fully_connected input volume mismatch");
            return {layer.out_dim};
        }
        case LayerKind::BatchNorm:
        case LayerKind::ReLU:
            return in;
        case LayerKind::MaxPool: {
            if (in.size() != 3) throw ValidationError("max_pool expects (C,H,W) input");
            int64_t oh = (in[1] - layer.pool) / layer.pool_stride + 1;
            int64_t ow = (in[2] - layer.pool) / layer.pool_stride + 1;
            if (oh <= 0 || ow <= 0) throw ValidationError("max_pool output collapses to zero");
            return {in[0], oh, ow};
        }
    }
    throw ValidationError("unreachable layer kind");
}

namespace {

const Tensor& resolve(const ModelIR& m, const std::string& name, const char* what) {
    auto it = m.tensors.find(name);
    if (it == m.tensors.end())
        throw ValidationError(std::string(what) + " references missing tensor: " + name);
    return it->second;
}

} // namespace

void ModelIR::validate() const {
    if (layers.empty()) throw ValidationError("model has no layers");
    if (input_shape.empty()) throw ValidationError("model has no input shape");
    for (int64_t d : input_shape)
        if (d <= 0) throw ValidationError("input dimension must be positive");

    for (const auto& [name, t] : tensors) {
        (void)name;
        t.validate();
    }

    std::vector<int64_t> shape = input_shape;
    for (const LayerSpec& layer : layers) {
        if (is_parameterized(layer.kind)) {
            if (layer.weight.empty())
                throw ValidationError("parameterized layer missing weight tensor");
            const Tensor& w = resolve(*this, layer.weight, "layer");
            if (w.shape() != layer.weight_shape())
                throw ValidationError("weight tensor shape mismatch for " + layer.weight);
            if (!layer.bias.empty()) {
                const Tensor& b = resolve(*this, layer.bias, "layer");
                int64_t expect = layer.kind == LayerKind::Conv2D ? layer.out_channels
                                                                 : layer.out_dim;
                if (b.size() != expect)
                    throw ValidationError("bias tensor length mismatch for " + layer.bias);
            }
        } else if (layer.kind == LayerKind::BatchNorm) {
            int64_t channels = shape[0];
            if (resolve(*this, layer.bn_scale, "batch_norm").size() != channels ||
                resolve(*this, layer.bn_shift, "batch_norm").size() != channels)
                throw ValidationError("batch_norm parameter length mismatch");
        }
        shape = layer_output_shape(layer, shape);
    }
}

// Weight tensors only; biases and batch-norm parameters ride the electronic
// path and are not part of the pruning/clustering budget.
uint64_t count_parameters(const ModelIR& model) {
    uint64_t total = 0;
    std::set<std::string> seen;
    for (const LayerSpec& layer : model.layers) {
        if (layer.weight.empty() || !seen.insert(layer.weight).second) continue;
        auto it = model.tensors.find(layer.weight);
        if (it != model.tensors.end()) total += static_cast<uint64_t>(it->second.size());
    }
    return total;
}

} // namespace psnn
