// SPDX-License-Identifier: Apache-2.0
#include "psnn/explore.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "psnn/errors.hpp"
#include "psnn/reference.hpp"

namespace psnn {

const char* objective_name(Objective o) {
    switch (o) {
        case Objective::FpsPerWatt: return "fps_per_watt";
        case Objective::Epb: return "epb";
        case Objective::Fps: return "fps";
        case Objective::AccuracyProxy: return "accuracy_proxy";
    }
    return "?";
}

Objective objective_from_name(const std::string& name) {
    if (name == "fps_per_watt") return Objective::FpsPerWatt;
    if (name == "epb") return Objective::Epb;
    if (name == "fps") return Objective::Fps;
    if (name == "accuracy_proxy") return Objective::AccuracyProxy;
    throw ConfigError("unknown objective: " + name);
}

void ExplorationGrid::validate() const {
    if (sparsities.empty() || cluster_counts.empty() || arch_configs.empty())
        throw ValidationError("exploration grid has an empty axis");
    for (double s : sparsities)
        if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("grid sparsity outside [0,1]");
    for (int c : cluster_counts)
        if (c < 1 || c > (1 << 16) || (c & (c - 1)) != 0)
            throw ValidationError("grid cluster counts must be powers of two up to 65536");
    for (const VduConfig& cfg : arch_configs) cfg.validate();
}

size_t ExplorationGrid::cardinality() const {
    const size_t subsets = layer_subsets.empty() ? 1 : layer_subsets.size();
    return sparsities.size() * cluster_counts.size() * subsets * arch_configs.size();
}

bool dominates(const GridPointResult& a, const GridPointResult& b) {
    if (a.failed || b.failed) return false;
    const bool ge = a.accuracy >= b.accuracy && a.fps >= b.fps &&
                    a.fps_per_watt >= b.fps_per_watt && a.epb <= b.epb;
    const bool gt = a.accuracy > b.accuracy || a.fps > b.fps ||
                    a.fps_per_watt > b.fps_per_watt || a.epb < b.epb;
    return ge && gt;
}

namespace {

int64_t argmax(std::span<const double> v) {
    int64_t best = 0;
    for (size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[static_cast<size_t>(best)]) best = static_cast<int64_t>(i);
    return best;
}

struct GridPoint {
    double sparsity;
    int clusters;
    size_t subset;
    std::vector<size_t> subset_layers; // empty = all parameterized
    VduConfig arch;
};

GridPointResult evaluate_point(const ModelIR& model,
                               const std::vector<EvalSample>& eval_set,
                               const std::vector<int64_t>& reference_top1,
                               const GridPoint& point, const DeviceParams& dev) {
    GridPointResult r;
    r.sparsity = point.sparsity;
    r.clusters = point.clusters;
    r.subset = point.subset;
    r.arch = point.arch;
    try {
        SparsityPlan plan;
        if (point.subset_layers.empty()) {
            plan = SparsityPlan::uniform(model, point.sparsity);
        } else {
            for (size_t li : point.subset_layers) plan.entries[li] = point.sparsity;
        }
        MaskedModel masked = prune(model, plan);
        ClusterResult clustered = cluster_weights(masked, point.clusters);
        const auto centroids = centroid_map(clustered.codebooks);

        double energy = 0.0, latency = 0.0;
        uint64_t bits = 0;
        size_t agree = 0;
        for (size_t i = 0; i < eval_set.size(); ++i) {
            SimulationResult sim =
                simulate(clustered.model, centroids, eval_set[i].input, point.arch, dev);
            energy += sim.report.total_energy_j;
            latency += sim.report.total_latency_s;
            bits += sim.report.bits_processed;
            const int64_t predicted = argmax(sim.output.data());
            const int64_t expected = eval_set[i].label >= 0
                                         ? eval_set[i].label
                                         : reference_top1[i];
            agree += predicted == expected;
        }
        r.accuracy = static_cast<double>(agree) / static_cast<double>(eval_set.size());
        r.energy_j = energy;
        r.latency_s = latency;
        r.fps = latency > 0.0 ? static_cast<double>(eval_set.size()) / latency : 0.0;
        const double avg_power = latency > 0.0 ? energy / latency : 0.0;
        r.fps_per_watt = avg_power > 0.0 ? r.fps / avg_power : 0.0;
        r.epb = bits > 0 ? energy / static_cast<double>(bits) : 0.0;
    } catch (const std::exception& e) {
        r.failed = true;
        r.error = e.what();
    }
    return r;
}

// Objective comparison; ties broken by grid index for determinism.
bool objective_less(Objective obj, const GridPointResult& a, const GridPointResult& b) {
    if (a.failed != b.failed) return !a.failed; // failures sort last
    double ka = 0.0, kb = 0.0;
    bool lower_better = false;
    switch (obj) {
        case Objective::FpsPerWatt: ka = a.fps_per_watt; kb = b.fps_per_watt; break;
        case Objective::Fps: ka = a.fps; kb = b.fps; break;
        case Objective::AccuracyProxy: ka = a.accuracy; kb = b.accuracy; break;
        case Objective::Epb: ka = a.epb; kb = b.epb; lower_better = true; break;
    }
    if (ka != kb) return lower_better ? ka < kb : ka > kb;
    return a.index < b.index;
}

std::vector<GridPointResult> pareto_front(const std::vector<GridPointResult>& results) {
    std::vector<GridPointResult> front;
    for (const GridPointResult& candidate : results) {
        if (candidate.failed) continue;
        bool dominated = false;
        for (const GridPointResult& other : results) {
            if (other.index != candidate.index && dominates(other, candidate)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) front.push_back(candidate);
    }
    return front;
}

} // namespace

ExploreResult explore(const ModelIR& model, const std::vector<EvalSample>& eval_set,
                      const ExplorationGrid& grid, const DeviceParams& dev, int jobs) {
    grid.validate();
    if (eval_set.empty()) throw ValidationError("explore requires a non-empty eval set");

    // Ground truth from the unoptimized model where labels are absent.
    std::vector<int64_t> reference_top1(eval_set.size());
    for (size_t i = 0; i < eval_set.size(); ++i)
        reference_top1[i] = argmax(reference_forward(model, eval_set[i].input).data());

    std::vector<GridPoint> points;
    const std::vector<std::vector<size_t>> subsets =
        grid.layer_subsets.empty() ? std::vector<std::vector<size_t>>{{}} : grid.layer_subsets;
    for (size_t si = 0; si < subsets.size(); ++si)
        for (double s : grid.sparsities)
            for (int c : grid.cluster_counts)
                for (const VduConfig& arch : grid.arch_configs)
                    points.push_back({s, c, si, subsets[si], arch});

    std::vector<GridPointResult> results(points.size());
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(points.size())));
    std::atomic<size_t> next{0};
    auto body = [&]() {
        for (size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1)) {
            results[i] = evaluate_point(model, eval_set, reference_top1, points[i], dev);
            results[i].index = i;
        }
    };
    if (workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int t = 0; t < workers; ++t) pool.emplace_back(body);
        for (std::thread& t : pool) t.join();
    }

    ExploreResult out;
    out.ranked = results;
    std::sort(out.ranked.begin(), out.ranked.end(),
              [&](const GridPointResult& a, const GridPointResult& b) {
                  return objective_less(grid.objective, a, b);
              });
    out.pareto = pareto_front(results);
    return out;
}

std::vector<GridPointResult> sweep_arch(const MaskedModel& masked,
                                        const std::map<size_t, std::vector<double>>& codebooks,
                                        const Tensor& input,
                                        std::span<const VduConfig> configs,
                                        const DeviceParams& dev) {
    std::vector<GridPointResult> results;
    results.reserve(configs.size());
    for (size_t i = 0; i < configs.size(); ++i) {
        GridPointResult r;
        r.index = i;
        r.arch = configs[i];
        try {
            SimulationResult sim = simulate(masked, codebooks, input, configs[i], dev);
            r.fps = sim.report.fps;
            r.fps_per_watt = sim.report.fps_per_watt;
            r.epb = sim.report.epb;
            r.energy_j = sim.report.total_energy_j;
            r.latency_s = sim.report.total_latency_s;
            r.accuracy = 1.0; // model is fixed across an architecture sweep
        } catch (const std::exception& e) {
            r.failed = true;
            r.error = e.what();
        }
        results.push_back(std::move(r));
    }
    std::sort(results.begin(), results.end(),
              [](const GridPointResult& a, const GridPointResult& b) {
                  if (a.failed != b.failed) return !a.failed;
                  if (a.fps_per_watt != b.fps_per_watt) return a.fps_per_watt > b.fps_per_watt;
                  if (a.epb != b.epb) return a.epb < b.epb;
                  return a.index < b.index;
              });
    return results;
}

std::string explore_results_to_csv(const std::vector<GridPointResult>& results,
                                   const std::vector<GridPointResult>* pareto) {
    std::vector<bool> in_front;
    if (pareto) {
        size_t max_index = 0;
        for (const GridPointResult& r : results) max_index = std::max(max_index, r.index);
        in_front.assign(max_index + 1, false);
        for (const GridPointResult& r : *pareto) in_front[r.index] = true;
    }

    std::ostringstream os;
    os << "index,sparsity,clusters,subset,n,m,N,K,accuracy,fps,fps_per_watt,epb,"
          "energy_j,latency_s,pareto,status,error\n";
    char buf[64];
    auto f = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const GridPointResult& r : results) {
        std::string error = r.error;
        std::replace(error.begin(), error.end(), ',', ';');
        const int front = pareto && r.index < in_front.size() && in_front[r.index];
        os << r.index << "," << f(r.sparsity) << "," << r.clusters << "," << r.subset << ","
           << r.arch.conv_width << "," << r.arch.fc_width << "," << r.arch.conv_units << ","
           << r.arch.fc_units << "," << f(r.accuracy) << "," << f(r.fps) << ","
           << f(r.fps_per_watt) << "," << f(r.epb) << "," << f(r.energy_j) << ","
           << f(r.latency_s) << "," << front << "," << (r.failed ? "failed" : "ok") << ","
           << error << "\n";
    }
    return os.str();
}

} // namespace psnn
