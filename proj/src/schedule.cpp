// SPDX-License-Identifier: Apache-2.0
#include "psnn/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "psnn/errors.hpp"
#include "psnn/reference.hpp"

namespace psnn {

void VduConfig::validate() const {
    if (conv_width < 1 || fc_width < 1 || conv_units < 1 || fc_units < 1)
        throw ValidationError("VDU configuration values must be positive");
}

std::vector<std::string> VduConfig::warnings() const {
    std::vector<std::string> w;
    if (fc_width <= conv_width)
        w.push_back("fc chunk width m <= conv chunk width n; the array expects m > n");
    if (fc_units >= conv_units)
        w.push_back("fc unit count K >= conv unit count N; the array expects N > K");
    return w;
}

void SimReport::finalize() {
    total_passes = total_gated = total_active = bits_processed = 0;
    total_energy_j = total_latency_s = 0.0;
    for (const LayerRecord& r : layers) {
        total_passes += r.passes;
        total_gated += r.gated_lanes;
        total_active += r.active_lanes;
        bits_processed += r.bits;
        total_energy_j += r.energy_j;
        total_latency_s += r.latency_s;
    }
    fps = total_latency_s > 0.0 ? 1.0 / total_latency_s : 0.0;
    avg_power_w = total_latency_s > 0.0 ? total_energy_j / total_latency_s : 0.0;
    fps_per_watt = avg_power_w > 0.0 ? fps / avg_power_w : 0.0;
    epb = bits_processed > 0 ? total_energy_j / static_cast<double>(bits_processed) : 0.0;
}

void SimReport::check_identities(double rel_tol) const {
    auto close = [rel_tol](double a, double b) {
        return std::fabs(a - b) <= rel_tol * std::max({std::fabs(a), std::fabs(b), 1e-300});
    };
    if (!close(fps_per_watt * avg_power_w, fps))
        throw ValidationError("report identity violated: fps_per_watt * avg_power != fps");
    if (!close(epb * static_cast<double>(bits_processed), total_energy_j))
        throw ValidationError("report identity violated: epb * bits != energy");
}

ScheduledLayer schedule_layer(std::span<const CompressedGemm> work, LayerKind kind,
                              const VduConfig& cfg, const DeviceParams& dev,
                              const QuantSpec& quant, std::span<const double> bn) {
    cfg.validate();
    if (!is_parameterized(kind))
        throw ValidationError("schedule_layer expects a conv2d or fully_connected layer");
    const bool is_conv = kind == LayerKind::Conv2D;
    const int width = is_conv ? cfg.conv_width : cfg.fc_width;
    const int units = is_conv ? cfg.conv_units : cfg.fc_units;

    ScheduledLayer out;
    out.record.kind = layer_kind_name(kind);
    out.record.photonic = true;
    out.outputs.reserve(work.size());

    for (size_t item_idx = 0; item_idx < work.size(); ++item_idx) {
        const CompressedGemm& item = work[item_idx];
        std::vector<double> values(static_cast<size_t>(item.output_dim), 0.0);

        auto bn_for_row = [&](int64_t row) {
            if (bn.empty()) return 1.0;
            return is_conv ? bn[item_idx] : bn[static_cast<size_t>(row)];
        };

        if (item.dense.empty()) {
            // Nothing drives the unit, but each output element still needs
            // its readout pass; all lanes are padding, hence gated.
            const std::vector<double> pad(static_cast<size_t>(width), 0.0);
            for (int64_t row = 0; row < item.output_dim; ++row) {
                VduPassResult pass = vdu_pass(pad, pad, bn_for_row(row), quant, dev, kind);
                out.record.passes += 1;
                out.record.gated_lanes += static_cast<uint64_t>(pass.vcsels_gated);
                out.record.energy_j += pass.energy_j;
                out.record.bits += pass_bits(0, quant, kind);
            }
            out.outputs.push_back(std::move(values));
            continue;
        }

        // Chunk-major ascending accumulation fixes the summation order.
        for (const WorkChunk& chunk : chunk_work(item, width)) {
            VduPassResult pass =
                vdu_pass(chunk.dense, chunk.sparse, bn_for_row(chunk.row), quant, dev, kind);
            values[static_cast<size_t>(chunk.row)] += pass.value;
            const int active = width - pass.vcsels_gated;
            out.record.passes += 1;
            out.record.gated_lanes += static_cast<uint64_t>(pass.vcsels_gated);
            out.record.active_lanes += static_cast<uint64_t>(active);
            out.record.energy_j += pass.energy_j;
            out.record.bits += pass_bits(active, quant, kind);
        }
        out.outputs.push_back(std::move(values));
    }

    if (out.record.passes > 0) {
        const uint64_t waves = (out.record.passes + units - 1) / units;
        out.record.latency_s =
            static_cast<double>(waves) * per_pass_latency(dev, quant, kind);
        // One TO calibration per engaged MR bank per layer, scaled by the
        // collective-tuning factor. A bank that never modulates (every lane
        // gated) needs no calibration.
        if (out.record.active_lanes > 0) {
            const uint64_t banks = std::min<uint64_t>(units, out.record.passes);
            out.record.energy_j += static_cast<double>(banks) * dev.to_tuning.power_w *
                                   dev.to_power_scale * dev.to_tuning.latency_s;
        }
    }
    return out;
}

std::map<size_t, std::vector<double>> centroid_map(const std::map<size_t, Codebook>& books) {
    std::map<size_t, std::vector<double>> out;
    for (const auto& [idx, book] : books) out[idx] = book.centroids;
    return out;
}

namespace {

double max_abs(std::span<const double> values) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::fabs(v));
    return m;
}

// Electronic post-processing shared by the photonic layers: bias add and,
// when a BatchNorm was fused into the passes, the bn_scale*bias + shift
// offset per channel.
void add_channel_offsets(Tensor& t, const Tensor* bias, const Tensor* bn_scale,
                         const Tensor* bn_shift) {
    if (!bias && !bn_shift) return;
    const int64_t channels = t.dim(0);
    const int64_t per_channel = t.size() / channels;
    for (int64_t c = 0; c < channels; ++c) {
        double offset = 0.0;
        if (bias) offset += (bn_scale ? (*bn_scale)[c] : 1.0) * (*bias)[c];
        if (bn_shift) offset += (*bn_shift)[c];
        for (int64_t i = 0; i < per_channel; ++i) t[c * per_channel + i] += offset;
    }
}

} // namespace

SimulationResult simulate(const MaskedModel& masked,
                          const std::map<size_t, std::vector<double>>& codebooks,
                          const Tensor& input, const VduConfig& cfg, const DeviceParams& dev,
                          const SimOptions& opt, SimTrace* trace) {
    dev.validate();
    cfg.validate();
    const ModelIR model = masked.effective_model();
    model.validate();
    if (input.shape() != model.input_shape)
        throw ValidationError("input shape does not match model input shape");

    // Weight DAC resolution follows the largest codebook in use.
    int weight_bits = 16;
    if (opt.weight_bits) {
        weight_bits = *opt.weight_bits;
    } else if (!codebooks.empty()) {
        size_t max_clusters = 1;
        for (const auto& [idx, centroids] : codebooks)
            max_clusters = std::max(max_clusters, centroids.size());
        weight_bits = required_dac_bits(static_cast<int>(max_clusters)).bits;
    }

    SimulationResult result;
    result.report.model = model.name;
    result.report.arch = cfg;
    result.report.weight_bits = weight_bits;
    result.report.activation_bits = opt.activation_bits;
    result.report.exact_mode = opt.exact_mode;
    if (trace) trace->layer_activations.clear();

    Tensor act = input;
    size_t fused_bn = model.layers.size(); // index of a BatchNorm consumed by fusion

    for (size_t li = 0; li < model.layers.size(); ++li) {
        const LayerSpec& layer = model.layers[li];
        LayerRecord record;
        record.layer_index = li;
        record.kind = layer_kind_name(layer.kind);

        if (is_parameterized(layer.kind)) {
            if (!codebooks.empty() && !codebooks.count(li)) {
                // A clustered model must provide a codebook for every layer
                // that still has surviving weights.
                bool has_nonzero = false;
                for (double v : model.tensors.at(layer.weight).data())
                    if (v != 0.0) { has_nonzero = true; break; }
                if (has_nonzero)
                    throw ValidationError("missing codebook for clustered layer " +
                                          std::to_string(li));
            }

            const Tensor& w = model.tensors.at(layer.weight);
            const Tensor* bias =
                layer.bias.empty() ? nullptr : &model.tensors.at(layer.bias);

            // Fuse a directly following BatchNorm into the passes.
            const Tensor* bn_scale = nullptr;
            const Tensor* bn_shift = nullptr;
            if (li + 1 < model.layers.size() &&
                model.layers[li + 1].kind == LayerKind::BatchNorm) {
                bn_scale = &model.tensors.at(model.layers[li + 1].bn_scale);
                bn_shift = &model.tensors.at(model.layers[li + 1].bn_shift);
                fused_bn = li + 1;
            }

            QuantSpec quant;
            quant.weight_bits = weight_bits;
            quant.activation_bits = opt.activation_bits;
            quant.exact_mode = opt.exact_mode;

            if (layer.kind == LayerKind::Conv2D) {
                quant.dense_max_abs = max_abs(w.data());
                quant.sparse_max_abs = max_abs(act.data());
                UnrolledConv unrolled = unroll_conv(w, act, layer.stride, layer.padding);
                std::vector<CompressedGemm> work = compress_conv(unrolled);
                std::span<const double> bn =
                    bn_scale ? bn_scale->data() : std::span<const double>{};
                ScheduledLayer sched =
                    schedule_layer(work, layer.kind, cfg, dev, quant, bn);
                record = sched.record;
                record.layer_index = li;

                Tensor out({unrolled.out_channels, unrolled.out_h, unrolled.out_w});
                for (int64_t oc = 0; oc < unrolled.out_channels; ++oc) {
                    const auto& vals = sched.outputs[static_cast<size_t>(oc)];
                    for (int64_t p = 0; p < unrolled.out_h * unrolled.out_w; ++p)
                        out[oc * unrolled.out_h * unrolled.out_w + p] =
                            vals[static_cast<size_t>(p)];
                }
                add_channel_offsets(out, bias, bn_scale, bn_shift);
                act = std::move(out);
            } else {
                Tensor flat({act.size()}, {act.data().begin(), act.data().end()});
                quant.dense_max_abs = max_abs(flat.data());
                quant.sparse_max_abs = max_abs(w.data());
                CompressedGemm work = compress_fc(w, flat.data());
                std::span<const double> bn =
                    bn_scale ? bn_scale->data() : std::span<const double>{};
                ScheduledLayer sched =
                    schedule_layer(std::span(&work, 1), layer.kind, cfg, dev, quant, bn);
                record = sched.record;
                record.layer_index = li;

                Tensor out({layer.out_dim}, std::move(sched.outputs[0]));
                add_channel_offsets(out, bias, bn_scale, bn_shift);
                act = std::move(out);
            }
        } else if (layer.kind == LayerKind::BatchNorm && li == fused_bn) {
            // Already applied inside the preceding layer's passes.
        } else {
            // Electronic layers: zero modeled cost.
            ModelIR single;
            single.name = model.name;
            single.input_shape = act.shape();
            single.layers = {layer};
            if (layer.kind == LayerKind::BatchNorm) {
                single.tensors.emplace(layer.bn_scale, model.tensors.at(layer.bn_scale));
                single.tensors.emplace(layer.bn_shift, model.tensors.at(layer.bn_shift));
            }
            act = reference_forward(single, act);
        }

        result.report.layers.push_back(record);
        if (trace) trace->layer_activations.push_back(act);
    }

    result.report.finalize();
    result.report.check_identities();
    result.output = std::move(act);
    return result;
}

} // namespace psnn
