// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "psnn/device.hpp"
#include "psnn/model.hpp"

namespace psnn {

// Outcome of one chunk-wide pass through a vector-dot-product unit.
struct VduPassResult {
    double value = 0.0;    // bn_scale * quantized dot product of the chunk
    double energy_j = 0.0;
    double latency_s = 0.0;
    int vcsels_gated = 0;  // lanes skipped because the sparse operand was zero
};

// Symmetric uniform quantizer: multiples of 2*max_abs/(2^bits - 1), round to
// nearest with ties away from zero, clamped to [-max_abs, max_abs]. Zero and
// +-max_abs are always representable; |q - v| <= max_abs/(2^bits - 1).
double quantize(double value, int bits, double max_abs);

// DAC row used for an operand path of the given resolution.
const DeviceRate& dac_for_bits(const DeviceParams& dev, int bits);

int dense_side_bits(const QuantSpec& quant, LayerKind kind);
int sparse_side_bits(const QuantSpec& quant, LayerKind kind);

// Serial datapath latency of one pass:
//   dense-side DAC -> EO tuning -> VCSEL -> photodetector -> ADC.
double per_pass_latency(const DeviceParams& dev, const QuantSpec& quant, LayerKind kind);

// One VDU pass. The dense chunk drives the VCSEL array, the sparse chunk is
// imprinted by the MR bank; a zero sparse element power-gates the lane
// (VCSEL and both DACs), so gated lanes cost nothing optically. Energy:
//   sum over active lanes of (dense DAC + VCSEL + sparse DAC + EO tuning)
//   + one broadband-MR EO event for the BN scale (skipped when every lane
//     is gated and no light is emitted)
//   + photodetector + ADC readout, charged per pass.
// layer_kind fixes the DAC assignment: CONV drives with weights (low-res
// DACs), FC drives with activations (16-bit DACs).
VduPassResult vdu_pass(std::span<const double> dense_chunk,
                       std::span<const double> sparse_chunk, double bn_scale,
                       const QuantSpec& quant, const DeviceParams& dev, LayerKind layer_kind);

// Data volume of one pass for the energy-per-bit denominator: every active
// lane moves dense-side plus sparse-side bits, and the ADC emits one 16-bit
// result.
uint64_t pass_bits(int active_lanes, const QuantSpec& quant, LayerKind kind);

inline constexpr int kAdcOutputBits = 16;

} // namespace psnn
