// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "psnn/schedule.hpp"

namespace psnn {

enum class Objective { FpsPerWatt, Epb, Fps, AccuracyProxy };

const char* objective_name(Objective o);
Objective objective_from_name(const std::string& name);

// Exhaustive grid: sparsity levels x cluster counts x layer subsets x
// architecture configs.
struct ExplorationGrid {
    std::vector<double> sparsities;
    std::vector<int> cluster_counts;              // capped at 2^16
    std::vector<std::vector<size_t>> layer_subsets; // empty inner list = all
    std::vector<VduConfig> arch_configs;
    Objective objective = Objective::FpsPerWatt;

    void validate() const;
    size_t cardinality() const;
};

struct GridPointResult {
    size_t index = 0; // position in grid iteration order
    double sparsity = 0.0;
    int clusters = 0;
    size_t subset = 0;
    VduConfig arch;

    double accuracy = 0.0; // top-1 agreement with the unoptimized reference
    double fps = 0.0;
    double fps_per_watt = 0.0;
    double epb = 0.0;
    double energy_j = 0.0;
    double latency_s = 0.0;

    bool failed = false;
    std::string error;
};

struct ExploreResult {
    std::vector<GridPointResult> ranked; // by objective, grid index tiebreak
    std::vector<GridPointResult> pareto; // non-dominated in (accuracy,fps,fps/W,epb)
};

// Labeled evaluation input; label < 0 means "use the unoptimized model's
// top-1 prediction as ground truth".
struct EvalSample {
    Tensor input;
    int label = -1;
};

// Runs prune -> cluster -> simulate for every grid point over the eval set.
// Point failures are recorded and do not abort the sweep. jobs > 1 evaluates
// points concurrently; result order stays deterministic.
ExploreResult explore(const ModelIR& model, const std::vector<EvalSample>& eval_set,
                      const ExplorationGrid& grid, const DeviceParams& dev, int jobs = 1);

// Architecture-only sweep over an already pruned+clustered model, ranked by
// FPS/W with EPB as the tiebreak.
std::vector<GridPointResult> sweep_arch(const MaskedModel& masked,
                                        const std::map<size_t, std::vector<double>>& codebooks,
                                        const Tensor& input,
                                        std::span<const VduConfig> configs,
                                        const DeviceParams& dev);

// True when a strictly dominates b in the tracked metric space
// (accuracy, fps, fps_per_watt higher-better; epb lower-better).
bool dominates(const GridPointResult& a, const GridPointResult& b);

// One row per grid point; the pareto column marks front members when the
// Pareto set is supplied.
std::string explore_results_to_csv(const std::vector<GridPointResult>& results,
                                   const std::vector<GridPointResult>* pareto = nullptr);

} // namespace psnn
