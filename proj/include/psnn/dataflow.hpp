// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "psnn/tensor.hpp"

namespace psnn {

// A matrix-vector product after zero elimination on the driving side.
// dense contains no zeros; rows[r] is aligned with dense entry-for-entry, so
//   output[r] = sum_j dense[j] * rows[r][j]
// reproduces the uncompressed product exactly. Row values may still be zero
// (residual sparsity handled by VDU power gating).
struct CompressedGemm {
    std::vector<double> dense;
    std::vector<int64_t> dense_index;       // original flat index per dense entry
    std::vector<std::vector<double>> rows;  // output_dim rows of length dense.size()
    int64_t output_dim = 0;
};

// im2col form of one convolution: flattened kernels against flattened input
// patches, one patch per output pixel in row-major output order.
struct UnrolledConv {
    std::vector<std::vector<double>> kernel_vectors; // out_channels x L, (ic,kh,kw) order
    std::vector<std::vector<double>> patch_columns;  // (oh*ow) x L
    int64_t out_channels = 0, out_h = 0, out_w = 0;
};

// FC compression: activation entries equal to zero are deleted together with
// the corresponding weight-matrix columns. weight is (out x in).
CompressedGemm compress_fc(const Tensor& weight, std::span<const double> activations);

UnrolledConv unroll_conv(const Tensor& kernels, const Tensor& ifmap, int64_t stride,
                         int64_t padding);

// CONV compression, one work item per output channel: zero kernel entries are
// deleted together with the corresponding patch rows. The kernel is the dense
// (driving) side for CONV layers.
std::vector<CompressedGemm> compress_conv(const UnrolledConv& unrolled);

// One chunk-wide slice of a dot product headed for a VDU pass. Lanes past
// `valid` are padding; their sparse value is zero, so the pass gates them.
struct WorkChunk {
    int64_t row = 0;      // output element within the work item
    int chunk_index = 0;  // position along the dense dimension
    std::vector<double> dense;
    std::vector<double> sparse;
    int valid = 0;
};

// Splits dense vector and every aligned row into ceil(L/chunk) contiguous
// segments, zero-padding the final segment. Ordered row-major, chunks
// ascending within a row.
std::vector<WorkChunk> chunk_work(const CompressedGemm& item, int chunk);

int64_t chunk_count(int64_t length, int chunk);

} // namespace psnn
