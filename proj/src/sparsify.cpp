// SPDX-License-Identifier: Apache-2.0
#include "psnn/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "psnn/errors.hpp"
#include "psnn/reference.hpp"

namespace psnn {

SparsityPlan SparsityPlan::uniform(const ModelIR& model, double sparsity) {
    SparsityPlan plan;
    for (size_t i = 0; i < model.layers.size(); ++i)
        if (is_parameterized(model.layers[i].kind)) plan.entries[i] = sparsity;
    return plan;
}

void SparsityPlan::validate(const ModelIR& model) const {
    for (const auto& [idx, s] : entries) {
        if (idx >= model.layers.size())
            throw ValidationError("sparsity plan references layer " + std::to_string(idx) +
                                  " beyond model depth");
        if (!is_parameterized(model.layers[idx].kind))
            throw ValidationError("sparsity plan references non-parameterized layer " +
                                  std::to_string(idx));
        if (!(s >= 0.0 && s <= 1.0))
            throw ValidationError("sparsity for layer " + std::to_string(idx) +
                                  " outside [0,1]");
    }
}

ModelIR MaskedModel::effective_model() const {
    ModelIR out = base;
    for (const auto& [idx, mask] : masks) {
        Tensor& w = out.tensors.at(out.layers[idx].weight);
        for (int64_t i = 0; i < w.size(); ++i)
            if (!mask[static_cast<size_t>(i)]) w[i] = 0.0;
    }
    return out;
}

MaskedModel prune(const ModelIR& model, const SparsityPlan& plan) {
    plan.validate(model);
    MaskedModel masked;
    masked.base = model;
    for (const auto& [idx, s] : plan.entries) {
        const Tensor& w = model.tensors.at(model.layers[idx].weight);
        const size_t count = static_cast<size_t>(w.size());
        const size_t pruned = static_cast<size_t>(std::floor(s * static_cast<double>(count)));

        std::vector<int64_t> order(count);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
            const double ma = std::fabs(w[a]), mb = std::fabs(w[b]);
            return ma != mb ? ma < mb : a < b;
        });

        std::vector<uint8_t> mask(count, 1);
        for (size_t k = 0; k < pruned; ++k) mask[static_cast<size_t>(order[k])] = 0;
        masked.masks[idx] = std::move(mask);
    }
    return masked;
}

uint64_t count_nonzero(const MaskedModel& masked) {
    uint64_t total = 0;
    for (size_t i = 0; i < masked.base.layers.size(); ++i) {
        const LayerSpec& layer = masked.base.layers[i];
        if (!is_parameterized(layer.kind)) continue;
        const int64_t count = masked.base.tensors.at(layer.weight).size();
        auto it = masked.masks.find(i);
        if (it == masked.masks.end()) {
            total += static_cast<uint64_t>(count);
        } else {
            for (uint8_t bit : it->second) total += bit;
        }
    }
    return total;
}

std::vector<LayerSparsity> layer_sparsity_profile(const MaskedModel& masked,
                                                  const Tensor& probe) {
    const ModelIR effective = masked.effective_model();
    ForwardTrace trace;
    reference_forward(effective, probe, &trace);

    std::vector<LayerSparsity> profile(effective.layers.size());
    for (size_t i = 0; i < effective.layers.size(); ++i) {
        const LayerSpec& layer = effective.layers[i];
        if (is_parameterized(layer.kind)) {
            const Tensor& w = effective.tensors.at(layer.weight);
            int64_t zeros = 0;
            for (double v : w.data()) zeros += v == 0.0;
            profile[i].weight_sparsity =
                static_cast<double>(zeros) / static_cast<double>(w.size());
        }
        const Tensor& out = trace.layer_outputs[i];
        int64_t zeros = 0;
        for (double v : out.data()) zeros += v == 0.0;
        profile[i].activation_sparsity =
            static_cast<double>(zeros) / static_cast<double>(out.size());
    }
    return profile;
}

} // namespace psnn
