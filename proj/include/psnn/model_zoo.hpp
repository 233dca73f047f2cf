// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>

#include "psnn/model.hpp"

namespace psnn {

// Portable deterministic RNG for synthetic weights and inputs (splitmix64;
// identical streams on every platform, unlike <random> distributions).
uint64_t splitmix64(uint64_t& state);
double uniform_unit(uint64_t& state); // [0, 1)

// Random tensor with f32-exact values in [lo, hi); identical for a given
// seed everywhere.
Tensor random_tensor(std::vector<int64_t> shape, uint64_t seed, double lo = -0.5,
                     double hi = 0.5);

// Synthetic input in [0, 1) for a model's input shape.
Tensor synthetic_input(const std::vector<int64_t>& shape, uint64_t seed);

// Demo/benchmark models with randomly initialized weights. Shapes mirror
// four small image classifiers; parameter totals:
//   mnist-like    2 conv + 2 fc   1,498,730
//   cifar10-like  6 conv + 1 fc     552,874
//   svhn-like     4 conv + 3 fc     552,362
ModelIR make_mnist_like(uint64_t seed = 1);
ModelIR make_cifar10_like(uint64_t seed = 2);
ModelIR make_svhn_like(uint64_t seed = 3);

// Small 3 conv + 2 fc network with batch norm and pooling; fast enough for
// end-to-end equivalence tests.
ModelIR make_toy_cnn(uint64_t seed = 4);

// Single hidden-layer FC stack (fc -> relu -> fc).
ModelIR make_toy_fc(uint64_t seed = 5);

ModelIR make_preset(const std::string& preset, uint64_t seed);

// Standalone tensor file: {"shape": [...], "values": [...]}.
Tensor load_tensor_json(const std::filesystem::path& path);
void save_tensor_json(const Tensor& t, const std::filesystem::path& path);

} // namespace psnn
