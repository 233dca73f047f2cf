// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "psnn/model.hpp"
#include "psnn/tensor.hpp"

namespace psnn {

// Layer-wise pruning targets. Layers absent from the plan are untouched.
struct SparsityPlan {
    std::map<size_t, double> entries; // layer index -> sparsity in [0,1]

    static SparsityPlan uniform(const ModelIR& model, double sparsity);
    void validate(const ModelIR& model) const;
};

// A model plus per-layer binary masks congruent to the weight tensors.
// Effective weight = weight * mask; masks are semantically transparent.
struct MaskedModel {
    ModelIR base;
    std::map<size_t, std::vector<uint8_t>> masks; // layer index -> flat mask

    // Materializes masked weights into a plain ModelIR.
    ModelIR effective_model() const;
};

// Magnitude pruning: per planned layer with P weights and target s, masks
// exactly floor(s*P) weights, chosen smallest |w| first, ties broken by
// lower flat index.
MaskedModel prune(const ModelIR& model, const SparsityPlan& plan);

// Surviving (mask=1) weights across all layers; unpruned layers count in full.
uint64_t count_nonzero(const MaskedModel& masked);

struct LayerSparsity {
    double weight_sparsity = 0.0;     // zero fraction of the effective weights
    double activation_sparsity = 0.0; // zero fraction of the layer's output
};

// Runs the reference forward pass on the masked model with a probe input and
// records per-layer weight and output-activation sparsity.
std::vector<LayerSparsity> layer_sparsity_profile(const MaskedModel& masked,
                                                  const Tensor& probe);

} // namespace psnn
