// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "psnn/schedule.hpp"

namespace psnn {

// Human-readable report. The header restates how FPS, FPS/W and EPB are
// defined so the numbers are self-describing.
std::string report_to_text(const SimReport& report);

// Versioned JSON ("schema": 1). Round-trips bit-exactly through
// report_from_json.
std::string report_to_json(const SimReport& report);
SimReport report_from_json(const std::string& text);

// Fixed column schema: layer,passes,gated,energy_j,latency_s.
std::string report_to_csv(const SimReport& report);

} // namespace psnn
