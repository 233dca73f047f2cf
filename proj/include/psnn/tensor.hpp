// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace psnn {

// Dense row-major tensor. Data is held in double precision; the on-disk
// container stores 32-bit floats (see model_io).
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int64_t> shape);
    Tensor(std::vector<int64_t> shape, std::vector<double> data);

    static Tensor zeros(std::vector<int64_t> shape) { return Tensor(std::move(shape)); }

    const std::vector<int64_t>& shape() const { return shape_; }
    int64_t size() const { return static_cast<int64_t>(data_.size()); }
    int64_t dim(size_t i) const { return shape_.at(i); }
    size_t rank() const { return shape_.size(); }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }
    double operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }
    double& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    // Throws ValidationError on dim<=0, shape/data length mismatch, or
    // non-finite values.
    void validate() const;

private:
    std::vector<int64_t> shape_;
    std::vector<double> data_;
};

int64_t shape_volume(std::span<const int64_t> shape);

} // namespace psnn
