// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace psnn {

struct DeviceRate {
    double latency_s = 0.0;
    double power_w = 0.0;
};

// Photonic and mixed-signal device characteristics. Defaults are the device
// figures the whole energy/latency model is calibrated to; every field can be
// overridden from the config file (device.* keys).
struct DeviceParams {
    DeviceRate eo_tuning{20e-9, 4e-6};        // power per nm of resonance shift
    DeviceRate to_tuning{4e-6, 27.5e-3};      // power per FSR
    DeviceRate vcsel{0.07e-9, 1.3e-3};
    DeviceRate photodetector{5.8e-12, 2.8e-3};
    DeviceRate dac16{0.33e-9, 40e-3};
    DeviceRate dac6{0.25e-9, 3e-3};
    DeviceRate adc16{14e-9, 62e-3};

    // Collective thermal-tuning savings factor in (0,1], applied to the
    // per-layer TO calibration charge.
    double to_power_scale = 1.0;
    // Mean resonance shift assumed when integrating the per-nm EO tuning
    // power; a knob, since the shift distribution is model-dependent.
    double eo_shift_nm = 1.0;

    void validate() const;
};

// Quantization context for one scheduled layer. weight_bits comes from the
// cluster codebook (required_dac_bits); activations stay at 16 bits.
// dense/sparse max_abs are the per-layer DAC full-scale ranges, filled in by
// the scheduler from the layer's operand tensors.
struct QuantSpec {
    int weight_bits = 16;
    int activation_bits = 16;
    bool exact_mode = false; // bypass quantization (functional oracle runs)
    double dense_max_abs = 0.0;
    double sparse_max_abs = 0.0;
};

} // namespace psnn
