// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "psnn/sparsify.hpp"

namespace psnn {

// Result of clustering one layer's surviving weights.
struct Codebook {
    std::vector<double> centroids;    // strictly increasing, duplicates merged
    std::vector<uint32_t> assignments; // per surviving weight, in flat order
    size_t size() const { return centroids.size(); }
};

struct DacResolution {
    int bits = 1;
};

// Weight DAC resolution needed for C cluster levels: max(1, ceil(log2 C)).
DacResolution required_dac_bits(int cluster_count);

// Density-based centroid initialization: the empirical CDF of the weights is
// split into C equal-probability regions and each centroid is the quantile at
// the region midpoint (k+0.5)/C, with linear interpolation between order
// statistics.
std::vector<double> init_centroids_density(std::span<const double> weights, int cluster_count);

// 1-D Lloyd iterations from the density initialization on a flat value list.
// Stops when assignments are stable or after max_iterations; empty clusters
// are dropped; exact-duplicate centroids are merged at the end.
// wcss_trace, when given, receives the within-cluster squared error after
// each assignment step.
Codebook cluster_values(std::span<const double> values, int cluster_count,
                        std::vector<double>* wcss_trace = nullptr);

struct ClusterResult {
    MaskedModel model;                   // surviving weights replaced by centroids
    std::map<size_t, Codebook> codebooks; // per clustered layer
    std::vector<std::string> warnings;   // layers skipped (no surviving weights)
};

// Clusters every parameterized layer's surviving weights with the same C.
// Pruned weights stay zero and take no part in clustering. Centroids are
// rounded to 32-bit float precision so in-memory weights match the container
// encoding exactly.
ClusterResult cluster_weights(const MaskedModel& masked, int cluster_count);

} // namespace psnn
