// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "psnn/tensor.hpp"

namespace psnn {

enum class LayerKind { Conv2D, FullyConnected, BatchNorm, ReLU, MaxPool };

const char* layer_kind_name(LayerKind k);
LayerKind layer_kind_from_name(const std::string& name);
bool is_parameterized(LayerKind k); // Conv2D / FullyConnected

struct LayerSpec {
    LayerKind kind = LayerKind::ReLU;

    // Conv2D: weight shape (out_channels, in_channels, kernel_h, kernel_w)
    int64_t out_channels = 0, in_channels = 0, kernel_h = 0, kernel_w = 0;
    int64_t stride = 1, padding = 0;

    // FullyConnected: weight shape (out_dim, in_dim)
    int64_t out_dim = 0, in_dim = 0;

    // MaxPool
    int64_t pool = 0, pool_stride = 0;

    // Tensor references into ModelIR::tensors
    std::string weight;   // Conv2D / FullyConnected
    std::string bias;     // optional
    std::string bn_scale; // BatchNorm, per channel
    std::string bn_shift; // BatchNorm, per channel

    std::vector<int64_t> weight_shape() const;

    static LayerSpec conv2d(int64_t out_ch, int64_t in_ch, int64_t kh, int64_t kw,
                            int64_t stride, int64_t padding, std::string weight,
                            std::string bias = {});
    static LayerSpec fully_connected(int64_t out, int64_t in, std::string weight,
                                     std::string bias = {});
    static LayerSpec batch_norm(std::string scale, std::string shift);
    static LayerSpec relu();
    static LayerSpec max_pool(int64_t window, int64_t stride);
};

// Sequential-chain CNN description. Immutable after load by convention;
// mutate only through explicit copies.
struct ModelIR {
    std::string name;
    std::vector<int64_t> input_shape; // (C,H,W) for conv nets, (D) for FC nets
    std::vector<LayerSpec> layers;
    std::map<std::string, Tensor> tensors;

    // Checks the chain: non-empty, per-layer shape compatibility, every
    // tensor reference resolves with the expected shape, tensors finite.
    void validate() const;
};

// Output shape of one layer given its input shape. FullyConnected accepts
// any input whose volume equals in_dim (implicit flatten).
std::vector<int64_t> layer_output_shape(const LayerSpec& layer, const std::vector<int64_t>& in);

// Total element count over the layers' weight tensors. With all-ones masks,
// count_nonzero of a MaskedModel equals this.
uint64_t count_parameters(const ModelIR& model);

} // namespace psnn
