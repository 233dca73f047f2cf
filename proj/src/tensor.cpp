// SPDX-License-Identifier: Apache-2.0
#include "psnn/tensor.hpp"

#include <cmath>

#include "psnn/errors.hpp"

namespace psnn {

int64_t shape_volume(std::span<const int64_t> shape) {
    int64_t v = 1;
    for (int64_t d : shape) v *= d;
    return v;
}

Tensor::Tensor(std::vector<int64_t> shape) : shape_(std::move(shape)) {
    data_.assign(static_cast<size_t>(shape_volume(shape_)), 0.0);
}

Tensor::Tensor(std::vector<int64_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {}

void Tensor::validate() const {
    for (int64_t d : shape_) {
        if (d <= 0) throw ValidationError("tensor dimension must be positive");
    }
    if (shape_volume(shape_) != size()) {
        throw ValidationError("tensor shape does not match data length");
    }
    for (double v : data_) {
        if (!std::isfinite(v)) throw ValidationError("tensor contains non-finite value");
    }
}

} // namespace psnn
