// SPDX-License-Identifier: Apache-2.0
#include "psnn/cluster.hpp"

#include <algorithm>
#include <cmath>

#include "psnn/errors.hpp"

namespace psnn {

DacResolution required_dac_bits(int cluster_count) {
    if (cluster_count < 1) throw ValidationError("cluster count must be >= 1");
    int bits = 0;
    while ((1LL << bits) < cluster_count) ++bits;
    return DacResolution{std::max(1, bits)};
}

std::vector<double> init_centroids_density(std::span<const double> weights, int cluster_count) {
    if (weights.empty()) throw ValidationError("cannot build centroids from empty weight list");
    if (cluster_count < 1) throw ValidationError("cluster count must be >= 1");

    std::vector<double> sorted(weights.begin(), weights.end());
    std::sort(sorted.begin(), sorted.end());
    const size_t n = sorted.size();

    std::vector<double> centroids;
    centroids.reserve(static_cast<size_t>(cluster_count));
    for (int k = 0; k < cluster_count; ++k) {
        const double p = (k + 0.5) / cluster_count;
        const double h = p * static_cast<double>(n - 1);
        const size_t lo = static_cast<size_t>(std::floor(h));
        const size_t hi = std::min(lo + 1, n - 1);
        const double frac = h - static_cast<double>(lo);
        centroids.push_back(sorted[lo] + frac * (sorted[hi] - sorted[lo]));
    }
    return centroids;
}

namespace {

// Collapses exact-duplicate adjacent centroids (sorted input) and remaps
// assignments.
void merge_duplicate_centroids(Codebook& book) {
    std::vector<double> merged;
    std::vector<uint32_t> remap(book.centroids.size(), 0);
    for (size_t c = 0; c < book.centroids.size(); ++c) {
        if (merged.empty() || book.centroids[c] != merged.back())
            merged.push_back(book.centroids[c]);
        remap[c] = static_cast<uint32_t>(merged.size() - 1);
    }
    for (uint32_t& a : book.assignments) a = remap[a];
    book.centroids = std::move(merged);
}

// Nearest centroid of v given sorted centroids; midpoint ties go to the
// lower index.
uint32_t nearest(const std::vector<double>& centroids, double v) {
    auto it = std::lower_bound(centroids.begin(), centroids.end(), v);
    if (it == centroids.begin()) return 0;
    if (it == centroids.end()) return static_cast<uint32_t>(centroids.size() - 1);
    const size_t hi = static_cast<size_t>(it - centroids.begin());
    const size_t lo = hi - 1;
    return (v - centroids[lo]) <= (centroids[hi] - v) ? static_cast<uint32_t>(lo)
                                                      : static_cast<uint32_t>(hi);
}

} // namespace

Codebook cluster_values(std::span<const double> values, int cluster_count,
                        std::vector<double>* wcss_trace) {
    constexpr int kMaxIterations = 100;

    std::vector<double> centroids = init_centroids_density(values, cluster_count);
    centroids.erase(std::unique(centroids.begin(), centroids.end()), centroids.end());

    std::vector<uint32_t> assign(values.size(), 0);
    std::vector<uint32_t> prev;
    if (wcss_trace) wcss_trace->clear();

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        for (size_t i = 0; i < values.size(); ++i) assign[i] = nearest(centroids, values[i]);
        if (wcss_trace) {
            double wcss = 0.0;
            for (size_t i = 0; i < values.size(); ++i) {
                const double d = values[i] - centroids[assign[i]];
                wcss += d * d;
            }
            wcss_trace->push_back(wcss);
        }
        if (assign == prev) break;

        std::vector<double> sum(centroids.size(), 0.0);
        std::vector<uint64_t> count(centroids.size(), 0);
        for (size_t i = 0; i < values.size(); ++i) {
            sum[assign[i]] += values[i];
            ++count[assign[i]];
        }

        // Recompute means and drop empty clusters; remap assignments.
        std::vector<double> next;
        std::vector<uint32_t> remap(centroids.size(), 0);
        for (size_t c = 0; c < centroids.size(); ++c) {
            if (count[c] == 0) continue;
            remap[c] = static_cast<uint32_t>(next.size());
            next.push_back(sum[c] / static_cast<double>(count[c]));
        }
        for (uint32_t& a : assign) a = remap[a];
        prev = assign;
        centroids = std::move(next);
    }

    Codebook book{std::move(centroids), std::move(assign)};
    merge_duplicate_centroids(book);
    return book;
}

ClusterResult cluster_weights(const MaskedModel& masked, int cluster_count) {
    if (cluster_count < 1) throw ValidationError("cluster count must be >= 1");
    ClusterResult result;
    result.model = masked;

    for (size_t li = 0; li < masked.base.layers.size(); ++li) {
        const LayerSpec& layer = masked.base.layers[li];
        if (!is_parameterized(layer.kind)) continue;

        Tensor& w = result.model.base.tensors.at(layer.weight);
        const auto mask_it = masked.masks.find(li);
        const std::vector<uint8_t>* mask =
            mask_it == masked.masks.end() ? nullptr : &mask_it->second;

        std::vector<double> survivors;
        std::vector<int64_t> positions;
        for (int64_t i = 0; i < w.size(); ++i) {
            if (mask && !(*mask)[static_cast<size_t>(i)]) {
                w[i] = 0.0; // pruned weights stay zero
                continue;
            }
            survivors.push_back(w[i]);
            positions.push_back(i);
        }
        if (survivors.empty()) {
            result.warnings.push_back("layer " + std::to_string(li) +
                                      " has no surviving weights; clustering skipped");
            continue;
        }

        Codebook book = cluster_values(survivors, cluster_count);
        // Round centroids to f32 so weights are bit-identical across a
        // container save/load cycle. Rounding can collide neighbours; merge
        // again to keep centroids strictly increasing.
        for (double& c : book.centroids) c = static_cast<double>(static_cast<float>(c));
        merge_duplicate_centroids(book);
        for (size_t k = 0; k < positions.size(); ++k)
            w[positions[k]] = book.centroids[book.assignments[k]];
        result.codebooks[li] = std::move(book);
    }
    return result;
}

} // namespace psnn
