// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "psnn/device.hpp"
#include "psnn/explore.hpp"
#include "psnn/schedule.hpp"

namespace psnn {

// Parsed run configuration. The file format is flat `dotted.key = value`
// lines; '#' starts a comment; lists are written [a, b, c]. Unknown keys are
// rejected with the offending key named.
struct RunConfig {
    DeviceParams device;
    VduConfig arch; // defaults to (n,m,N,K) = (5,50,50,10)

    std::optional<double> uniform_sparsity;  // sparsity = <float>
    std::map<size_t, double> layer_sparsity; // layer.<i>.sparsity = <float>
    int clusters = 64;

    ExplorationGrid grid;   // explore.* keys
    size_t eval_count = 4;  // explore.eval_count, synthetic eval set size

    // Builds the pruning plan: explicit per-layer entries win over the
    // uniform level; with neither, an empty plan.
    SparsityPlan sparsity_plan(const ModelIR& model) const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::filesystem::path& path);

// "<n>x<m>x<N>x<K>", e.g. "5x50x50x10".
VduConfig parse_arch_spec(const std::string& spec);

} // namespace psnn
