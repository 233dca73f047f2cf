// SPDX-License-Identifier: Apache-2.0
#include "psnn/dataflow.hpp"

#include <algorithm>

#include "psnn/errors.hpp"

namespace psnn {

CompressedGemm compress_fc(const Tensor& weight, std::span<const double> activations) {
    if (weight.rank() != 2) throw ValidationError("compress_fc expects a 2-D weight");
    const int64_t out = weight.dim(0), in = weight.dim(1);
    if (static_cast<int64_t>(activations.size()) != in)
        throw ValidationError("activation length does not match weight columns");

    CompressedGemm g;
    g.output_dim = out;
    for (int64_t i = 0; i < in; ++i) {
        if (activations[static_cast<size_t>(i)] == 0.0) continue;
        g.dense.push_back(activations[static_cast<size_t>(i)]);
        g.dense_index.push_back(i);
    }
    g.rows.resize(static_cast<size_t>(out));
    for (int64_t o = 0; o < out; ++o) {
        auto& row = g.rows[static_cast<size_t>(o)];
        row.reserve(g.dense.size());
        for (int64_t i : g.dense_index) row.push_back(weight[o * in + i]);
    }
    return g;
}

UnrolledConv unroll_conv(const Tensor& kernels, const Tensor& ifmap, int64_t stride,
                         int64_t padding) {
    if (kernels.rank() != 4 || ifmap.rank() != 3)
        throw ValidationError("unroll_conv expects 4-D kernels and a 3-D feature map");
    const int64_t OC = kernels.dim(0), IC = kernels.dim(1);
    const int64_t KH = kernels.dim(2), KW = kernels.dim(3);
    const int64_t C = ifmap.dim(0), H = ifmap.dim(1), W = ifmap.dim(2);
    if (C != IC) throw ValidationError("kernel/feature-map channel mismatch");
    const int64_t OH = (H + 2 * padding - KH) / stride + 1;
    const int64_t OW = (W + 2 * padding - KW) / stride + 1;
    if (OH <= 0 || OW <= 0) throw ValidationError("convolution geometry collapses");
    const int64_t L = IC * KH * KW;

    UnrolledConv u;
    u.out_channels = OC;
    u.out_h = OH;
    u.out_w = OW;

    u.kernel_vectors.assign(static_cast<size_t>(OC), {});
    for (int64_t oc = 0; oc < OC; ++oc) {
        auto& k = u.kernel_vectors[static_cast<size_t>(oc)];
        k.assign(kernels.data().begin() + oc * L, kernels.data().begin() + (oc + 1) * L);
    }

    u.patch_columns.assign(static_cast<size_t>(OH * OW), std::vector<double>(static_cast<size_t>(L), 0.0));
    for (int64_t oy = 0; oy < OH; ++oy) {
        for (int64_t ox = 0; ox < OW; ++ox) {
            auto& patch = u.patch_columns[static_cast<size_t>(oy * OW + ox)];
            int64_t p = 0;
            for (int64_t ic = 0; ic < IC; ++ic) {
                for (int64_t ky = 0; ky < KH; ++ky) {
                    const int64_t iy = oy * stride + ky - padding;
                    for (int64_t kx = 0; kx < KW; ++kx, ++p) {
                        const int64_t ix = ox * stride + kx - padding;
                        if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue; // stays 0
                        patch[static_cast<size_t>(p)] = ifmap[(ic * H + iy) * W + ix];
                    }
                }
            }
        }
    }
    return u;
}

std::vector<CompressedGemm> compress_conv(const UnrolledConv& unrolled) {
    const int64_t pixels = unrolled.out_h * unrolled.out_w;
    std::vector<CompressedGemm> items;
    items.reserve(unrolled.kernel_vectors.size());
    for (const auto& kernel : unrolled.kernel_vectors) {
        CompressedGemm g;
        g.output_dim = pixels;
        for (size_t i = 0; i < kernel.size(); ++i) {
            if (kernel[i] == 0.0) continue;
            g.dense.push_back(kernel[i]);
            g.dense_index.push_back(static_cast<int64_t>(i));
        }
        g.rows.resize(static_cast<size_t>(pixels));
        for (int64_t p = 0; p < pixels; ++p) {
            const auto& patch = unrolled.patch_columns[static_cast<size_t>(p)];
            auto& row = g.rows[static_cast<size_t>(p)];
            row.reserve(g.dense.size());
            for (int64_t i : g.dense_index) row.push_back(patch[static_cast<size_t>(i)]);
        }
        items.push_back(std::move(g));
    }
    return items;
}

int64_t chunk_count(int64_t length, int chunk) {
    if (chunk < 1) throw ValidationError("chunk width must be >= 1");
    return (length + chunk - 1) / chunk;
}

std::vector<WorkChunk> chunk_work(const CompressedGemm& item, int chunk) {
    const int64_t L = static_cast<int64_t>(item.dense.size());
    const int64_t n_chunks = chunk_count(L, chunk);

    std::vector<WorkChunk> out;
    out.reserve(static_cast<size_t>(item.output_dim * n_chunks));
    for (int64_t r = 0; r < item.output_dim; ++r) {
        const auto& row = item.rows[static_cast<size_t>(r)];
        for (int64_t c = 0; c < n_chunks; ++c) {
            const int64_t begin = c * chunk;
            const int64_t end = std::min<int64_t>(begin + chunk, L);
            WorkChunk wc;
            wc.row = r;
            wc.chunk_index = static_cast<int>(c);
            wc.valid = static_cast<int>(end - begin);
            wc.dense.assign(static_cast<size_t>(chunk), 0.0);
            wc.sparse.assign(static_cast<size_t>(chunk), 0.0);
            for (int64_t i = begin; i < end; ++i) {
                wc.dense[static_cast<size_t>(i - begin)] = item.dense[static_cast<size_t>(i)];
                wc.sparse[static_cast<size_t>(i - begin)] = row[static_cast<size_t>(i)];
            }
            out.push_back(std::move(wc));
        }
    }
    return out;
}

} // namespace psnn
