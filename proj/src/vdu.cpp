// SPDX-License-Identifier: Apache-2.0
#include "psnn/vdu.hpp"

#include <cmath>

#include "psnn/errors.hpp"

namespace psnn {

void DeviceParams::validate() const {
    const DeviceRate* rates[] = {&eo_tuning, &to_tuning,      &vcsel, &photodetector,
                                 &dac16,     &dac6,           &adc16};
    for (const DeviceRate* r : rates) {
        if (r->latency_s <= 0.0 || r->power_w <= 0.0)
            throw ValidationError("device latencies and powers must be strictly positive");
    }
    if (!(to_power_scale > 0.0 && to_power_scale <= 1.0))
        throw ValidationError("to_power_scale must lie in (0,1]");
    if (eo_shift_nm <= 0.0) throw ValidationError("eo_shift_nm must be positive");
}

double quantize(double value, int bits, double max_abs) {
    if (bits < 1) throw ValidationError("quantizer bits must be >= 1");
    if (max_abs == 0.0) return 0.0; // degenerate all-zero operand range
    const double levels = std::pow(2.0, bits) - 1.0;
    const double step = 2.0 * max_abs / levels;
    double q = std::round(value / step) * step; // std::round: ties away from zero
    if (q > max_abs) q = max_abs;
    if (q < -max_abs) q = -max_abs;
    return q;
}

const DeviceRate& dac_for_bits(const DeviceParams& dev, int bits) {
    return bits <= 6 ? dev.dac6 : dev.dac16;
}

int dense_side_bits(const QuantSpec& quant, LayerKind kind) {
    return kind == LayerKind::Conv2D ? quant.weight_bits : quant.activation_bits;
}

int sparse_side_bits(const QuantSpec& quant, LayerKind kind) {
    return kind == LayerKind::Conv2D ? quant.activation_bits : quant.weight_bits;
}

double per_pass_latency(const DeviceParams& dev, const QuantSpec& quant, LayerKind kind) {
    const DeviceRate& dense_dac = dac_for_bits(dev, dense_side_bits(quant, kind));
    return dense_dac.latency_s + dev.eo_tuning.latency_s + dev.vcsel.latency_s +
           dev.photodetector.latency_s + dev.adc16.latency_s;
}

VduPassResult vdu_pass(std::span<const double> dense_chunk,
                       std::span<const double> sparse_chunk, double bn_scale,
                       const QuantSpec& quant, const DeviceParams& dev, LayerKind layer_kind) {
    if (dense_chunk.size() != sparse_chunk.size())
        throw ValidationError("vdu_pass chunk length mismatch");

    const int dense_bits = dense_side_bits(quant, layer_kind);
    const int sparse_bits = sparse_side_bits(quant, layer_kind);
    const DeviceRate& dense_dac = dac_for_bits(dev, dense_bits);
    const DeviceRate& sparse_dac = dac_for_bits(dev, sparse_bits);

    const double eo_event_j = dev.eo_tuning.power_w * dev.eo_shift_nm * dev.eo_tuning.latency_s;
    const double lane_j = dense_dac.power_w * dense_dac.latency_s +
                          dev.vcsel.power_w * dev.vcsel.latency_s +
                          sparse_dac.power_w * sparse_dac.latency_s + eo_event_j;

    double acc = 0.0;
    int active = 0;
    for (size_t i = 0; i < dense_chunk.size(); ++i) {
        if (sparse_chunk[i] == 0.0) continue; // gated lane (zero operand or padding)
        ++active;
        if (quant.exact_mode) {
            acc += dense_chunk[i] * sparse_chunk[i];
        } else {
            acc += quantize(dense_chunk[i], dense_bits, quant.dense_max_abs) *
                   quantize(sparse_chunk[i], sparse_bits, quant.sparse_max_abs);
        }
    }

    VduPassResult r;
    r.value = bn_scale * acc;
    r.vcsels_gated = static_cast<int>(dense_chunk.size()) - active;
    r.latency_s = per_pass_latency(dev, quant, layer_kind);
    r.energy_j = active * lane_j +
                 (active > 0 ? eo_event_j : 0.0) + // broadband BN MR retune
                 dev.photodetector.power_w * dev.photodetector.latency_s +
                 dev.adc16.power_w * dev.adc16.latency_s;
    return r;
}

uint64_t pass_bits(int active_lanes, const QuantSpec& quant, LayerKind kind) {
    return static_cast<uint64_t>(active_lanes) *
               (static_cast<uint64_t>(dense_side_bits(quant, kind)) +
                static_cast<uint64_t>(sparse_side_bits(quant, kind))) +
           kAdcOutputBits;
}

} // namespace psnn
