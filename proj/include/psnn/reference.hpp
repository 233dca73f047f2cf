// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "psnn/model.hpp"
#include "psnn/tensor.hpp"

namespace psnn {

// Per-layer outputs captured during a forward pass.
struct ForwardTrace {
    std::vector<Tensor> layer_outputs;
};

// Exact double-precision forward pass: dense convolution, dense GEMM,
// batch norm as scale*x + shift, ReLU, max-pool. No quantization, no
// compression. This is the functional oracle the photonic path is checked
// against.
Tensor reference_forward(const ModelIR& model, const Tensor& input,
                         ForwardTrace* trace = nullptr);

} // namespace psnn
