// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>

#include "psnn/model.hpp"
#include "psnn/sparsify.hpp"

namespace psnn {

// Everything a model container can carry: the model itself plus the optional
// pipeline artifacts (pruning masks, per-layer cluster centroids).
struct StoredModel {
    ModelIR model;
    std::map<size_t, std::vector<uint8_t>> masks;      // layer index -> flat mask
    std::map<size_t, std::vector<double>> codebooks;   // layer index -> centroids

    MaskedModel masked() const { return MaskedModel{model, masks}; }
};

// Container layout: a directory with
//   manifest.json  - name, input shape, ordered layer records, tensor table
//                    (name, shape, byte offset, byte length), parameter count
//   tensors.bin    - little-endian float32, row-major, concatenated in
//                    manifest order
// Masks are stored as 0/1 tensors named "<weight>.mask"; centroids are
// embedded in the layer records. The byte layout is normative: identical
// containers are byte-identical.
void save_container(const StoredModel& stored, const std::filesystem::path& dir);
StoredModel load_container(const std::filesystem::path& dir);

// Plain-model entry points.
void save_model(const ModelIR& model, const std::filesystem::path& dir);
ModelIR load_model(const std::filesystem::path& dir);

} // namespace psnn
