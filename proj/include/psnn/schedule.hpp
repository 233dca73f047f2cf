// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>

#include "psnn/cluster.hpp"
#include "psnn/dataflow.hpp"
#include "psnn/device.hpp"
#include "psnn/sparsify.hpp"
#include "psnn/vdu.hpp"

namespace psnn {

// VDU array shape: N CONV units of width n, K FC units of width m.
struct VduConfig {
    int conv_width = 5;  // n
    int fc_width = 50;   // m
    int conv_units = 50; // N
    int fc_units = 10;   // K

    void validate() const; // positivity
    // Advisory only: the architecture expects m > n and N > K.
    std::vector<std::string> warnings() const;
};

struct LayerRecord {
    size_t layer_index = 0;
    std::string kind;
    bool photonic = false;
    uint64_t passes = 0;
    uint64_t gated_lanes = 0;
    uint64_t active_lanes = 0;
    uint64_t bits = 0;
    double energy_j = 0.0;
    double latency_s = 0.0;
};

struct SimReport {
    std::string model;
    VduConfig arch;
    int weight_bits = 16;
    int activation_bits = 16;
    bool exact_mode = false;

    std::vector<LayerRecord> layers;
    uint64_t total_passes = 0;
    uint64_t total_gated = 0;
    uint64_t total_active = 0;
    uint64_t bits_processed = 0;
    double total_energy_j = 0.0;
    double total_latency_s = 0.0;

    double fps = 0.0;          // 1 / total latency, single image
    double avg_power_w = 0.0;  // total energy / total latency
    double fps_per_watt = 0.0; // fps / avg power
    double epb = 0.0;          // total energy / bits processed

    // Sums layer records into totals and computes the derived metrics.
    void finalize();
    // Verifies fps_per_watt*avg_power == fps and epb*bits == energy.
    void check_identities(double rel_tol = 1e-9) const;
};

// One layer's worth of scheduled photonic work.
struct ScheduledLayer {
    LayerRecord record;
    // Accumulated dot products, one vector per work item (CONV: per output
    // channel; FC: a single item).
    std::vector<std::vector<double>> outputs;
};

// Chunks every work item by the unit width (n for CONV, m for FC), dispatches
// the passes round-robin over the unit array, and accumulates partial sums
// per output element in chunk order. Units run in lockstep waves, so
//   layer latency = ceil(total passes / unit count) * per-pass latency.
// Energy is the sum of pass energies plus one TO calibration event per
// engaged MR bank. bn holds broadband-MR batch-norm scales: one per work item
// for CONV, one per output row for FC; empty means no scaling.
// Every output element costs at least one pass (its ADC readout), so an
// all-zero dense vector still schedules fully gated readout passes.
ScheduledLayer schedule_layer(std::span<const CompressedGemm> work, LayerKind kind,
                              const VduConfig& cfg, const DeviceParams& dev,
                              const QuantSpec& quant, std::span<const double> bn = {});

struct SimOptions {
    bool exact_mode = false;
    int activation_bits = 16;
    std::optional<int> weight_bits; // default: from codebooks, else 16
};

// Post-layer activations as they flow through the simulated pipeline
// (batch-norm fused into the preceding photonic layer where applicable).
struct SimTrace {
    std::vector<Tensor> layer_activations;
};

struct SimulationResult {
    SimReport report;
    Tensor output;
};

// Runs the full model: CONV and FC layers through the photonic datapath
// (compression, chunking, VDU passes), everything else electronically at zero
// modeled cost. A BatchNorm directly after a photonic layer is applied inside
// the passes via the broadband MR; bias and BN shift are electronic.
SimulationResult simulate(const MaskedModel& masked,
                          const std::map<size_t, std::vector<double>>& codebooks,
                          const Tensor& input, const VduConfig& cfg, const DeviceParams& dev,
                          const SimOptions& opt = {}, SimTrace* trace = nullptr);

// Centroid arrays of a clustering result, keyed by layer.
std::map<size_t, std::vector<double>> centroid_map(const std::map<size_t, Codebook>& books);

} // namespace psnn
