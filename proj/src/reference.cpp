// SPDX-License-Identifier: Apache-2.0
#include "psnn/reference.hpp"

#include <algorithm>
#include <limits>

#include "psnn/errors.hpp"

namespace psnn {

namespace {

Tensor conv2d(const LayerSpec& l, const Tensor& w, const Tensor* bias, const Tensor& in) {
    const int64_t C = in.dim(0), H = in.dim(1), W = in.dim(2);
    const int64_t KH = l.kernel_h, KW = l.kernel_w;
    const int64_t OH = (H + 2 * l.padding - KH) / l.stride + 1;
    const int64_t OW = (W + 2 * l.padding - KW) / l.stride + 1;
    Tensor out({l.out_channels, OH, OW});
    for (int64_t oc = 0; oc < l.out_channels; ++oc) {
        for (int64_t oy = 0; oy < OH; ++oy) {
            for (int64_t ox = 0; ox < OW; ++ox) {
                double acc = 0.0;
                for (int64_t ic = 0; ic < C; ++ic) {
                    for (int64_t ky = 0; ky < KH; ++ky) {
                        const int64_t iy = oy * l.stride + ky - l.padding;
                        if (iy < 0 || iy >= H) continue;
                        for (int64_t kx = 0; kx < KW; ++kx) {
                            const int64_t ix = ox * l.stride + kx - l.padding;
                            if (ix < 0 || ix >= W) continue;
                            acc += w[((oc * C + ic) * KH + ky) * KW + kx] *
                                   in[(ic * H + iy) * W + ix];
                        }
                    }
                }
                if (bias) acc += (*bias)[oc];
                out[(oc * OH + oy) * OW + ox] = acc;
            }
        }
    }
    return out;
}

Tensor fully_connected(const LayerSpec& l, const Tensor& w, const Tensor* bias,
                       const Tensor& in) {
    Tensor out({l.out_dim});
    for (int64_t o = 0; o < l.out_dim; ++o) {
        double acc = 0.0;
        for (int64_t i = 0; i < l.in_dim; ++i) acc += w[o * l.in_dim + i] * in[i];
        if (bias) acc += (*bias)[o];
        out[o] = acc;
    }
    return out;
}

Tensor max_pool(const LayerSpec& l, const Tensor& in) {
    const int64_t C = in.dim(0), H = in.dim(1), W = in.dim(2);
    const int64_t OH = (H - l.pool) / l.pool_stride + 1;
    const int64_t OW = (W - l.pool) / l.pool_stride + 1;
    Tensor out({C, OH, OW});
    for (int64_t c = 0; c < C; ++c)
        for (int64_t oy = 0; oy < OH; ++oy)
            for (int64_t ox = 0; ox < OW; ++ox) {
                double best = -std::numeric_limits<double>::infinity();
                for (int64_t ky = 0; ky < l.pool; ++ky)
                    for (int64_t kx = 0; kx < l.pool; ++kx) {
                        best = std::max(best, in[(c * H + oy * l.pool_stride + ky) * W +
                                                 ox * l.pool_stride + kx]);
                    }
                out[(c * OH + oy) * OW + ox] = best;
            }
    return out;
}

Tensor batch_norm(const Tensor& scale, const Tensor& shift, const Tensor& in) {
    Tensor out = in;
    const int64_t C = in.dim(0);
    const int64_t per_channel = in.size() / C;
    for (int64_t c = 0; c < C; ++c)
        for (int64_t i = 0; i < per_channel; ++i)
            out[c * per_channel + i] = scale[c] * in[c * per_channel + i] + shift[c];
    return out;
}

} // namespace

Tensor reference_forward(const ModelIR& model, const Tensor& input, ForwardTrace* trace) {
    if (input.shape() != model.input_shape)
        throw ValidationError("input shape does not match model input shape");
    if (trace) trace->layer_outputs.clear();

    Tensor act = input;
    for (const LayerSpec& layer : model.layers) {
        switch (layer.kind) {
            case LayerKind::Conv2D: {
                const Tensor& w = model.tensors.at(layer.weight);
                const Tensor* b = layer.bias.empty() ? nullptr : &model.tensors.at(layer.bias);
                act = conv2d(layer, w, b, act);
                break;
            }
            case LayerKind::FullyConnected: {
                const Tensor& w = model.tensors.at(layer.weight);
                const Tensor* b = layer.bias.empty() ? nullptr : &model.tensors.at(layer.bias);
                // implicit flatten
                Tensor flat({act.size()}, {act.data().begin(), act.data().end()});
                act = fully_connected(layer, w, b, flat);
                break;
            }
            case LayerKind::BatchNorm:
                act = batch_norm(model.tensors.at(layer.bn_scale),
                                 model.tensors.at(layer.bn_shift), act);
                break;
            case LayerKind::ReLU:
                for (double& v : act.data()) v = std::max(v, 0.0);
                break;
            case LayerKind::MaxPool:
                act = max_pool(layer, act);
                break;
        }
        if (trace) trace->layer_outputs.push_back(act);
    }
    return act;
}

} // namespace psnn
