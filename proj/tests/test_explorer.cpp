// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "psnn/errors.hpp"
#include "psnn/explore.hpp"
#include "psnn/model_zoo.hpp"

using namespace psnn;

namespace {

std::vector<EvalSample> synthetic_eval(const ModelIR& model, size_t count, uint64_t seed) {
    std::vector<EvalSample> set;
    for (size_t i = 0; i < count; ++i)
        set.push_back({synthetic_input(model.input_shape, seed + i), -1});
    return set;
}

ExplorationGrid small_grid() {
    ExplorationGrid grid;
    grid.sparsities = {0.0, 0.4, 0.8};
    grid.cluster_counts = {4, 16, 64};
    grid.arch_configs = {VduConfig{}, VduConfig{3, 20, 20, 4}};
    return grid;
}

} // namespace

TEST_CASE("identity pipeline point keeps full agreement with the reference") {
    const ModelIR model = make_toy_fc(111);
    ExplorationGrid grid;
    grid.sparsities = {0.0};
    grid.cluster_counts = {1 << 16}; // enough clusters that weights are unchanged
    grid.arch_configs = {VduConfig{}};

    const ExploreResult result = explore(model, synthetic_eval(model, 4, 7), grid,
                                         DeviceParams{});
    REQUIRE(result.ranked.size() == 1);
    CHECK_FALSE(result.ranked[0].failed);
    CHECK(result.ranked[0].accuracy == 1.0);
}

TEST_CASE("higher sparsity cannot cost more energy on a gating-dominated model") {
    ModelIR model;
    model.name = "mono";
    model.input_shape = {30};
    model.tensors.emplace("w", random_tensor({12, 30}, 113));
    model.layers.push_back(LayerSpec::fully_connected(12, 30, "w"));
    model.validate();

    ExplorationGrid grid;
    grid.sparsities = {0.2, 0.7};
    grid.cluster_counts = {64};
    grid.arch_configs = {VduConfig{}};

    std::vector<EvalSample> eval = {{random_tensor({30}, 114, 0.1, 1.0), -1}};
    const ExploreResult result = explore(model, eval, grid, DeviceParams{});
    REQUIRE(result.ranked.size() == 2);
    const auto* low = &result.ranked[0];
    const auto* high = &result.ranked[1];
    if (low->sparsity > high->sparsity) std::swap(low, high);
    CHECK(high->energy_j <= low->energy_j + 1e-18);
}

TEST_CASE("grid sweep is exhaustive, deterministic, and matches re-evaluation") {
    const ModelIR model = make_toy_fc(115);
    const auto eval = synthetic_eval(model, 3, 9);
    const ExplorationGrid grid = small_grid();

    const ExploreResult a = explore(model, eval, grid, DeviceParams{});
    const ExploreResult b = explore(model, eval, grid, DeviceParams{});
    REQUIRE(a.ranked.size() == grid.cardinality());

    for (size_t i = 0; i < a.ranked.size(); ++i) {
        CHECK(a.ranked[i].index == b.ranked[i].index);
        CHECK(a.ranked[i].fps_per_watt == b.ranked[i].fps_per_watt);
        CHECK(a.ranked[i].accuracy == b.ranked[i].accuracy);
    }

    // Ranking respects the objective.
    for (size_t i = 1; i < a.ranked.size(); ++i)
        CHECK(a.ranked[i - 1].fps_per_watt >= a.ranked[i].fps_per_watt);

    // An independent second sweep point-by-point agrees with the best choice.
    const GridPointResult& best = a.ranked.front();
    for (const GridPointResult& r : a.ranked)
        CHECK(best.fps_per_watt >= r.fps_per_watt);
}

TEST_CASE("parallel evaluation gives identical results") {
    const ModelIR model = make_toy_fc(116);
    const auto eval = synthetic_eval(model, 2, 11);
    ExplorationGrid grid = small_grid();
    grid.cluster_counts = {16};

    const ExploreResult serial = explore(model, eval, grid, DeviceParams{}, 1);
    const ExploreResult parallel = explore(model, eval, grid, DeviceParams{}, 4);
    REQUIRE(serial.ranked.size() == parallel.ranked.size());
    for (size_t i = 0; i < serial.ranked.size(); ++i) {
        CHECK(serial.ranked[i].index == parallel.ranked[i].index);
        CHECK(serial.ranked[i].energy_j == parallel.ranked[i].energy_j);
    }
}

TEST_CASE("pareto set matches a brute-force dominance check") {
    const ModelIR model = make_toy_fc(117);
    const auto eval = synthetic_eval(model, 3, 13);
    const ExplorationGrid grid = small_grid();
    const ExploreResult result = explore(model, eval, grid, DeviceParams{});

    // Brute force over all pairs.
    std::vector<size_t> expected;
    for (const GridPointResult& c : result.ranked) {
        if (c.failed) continue;
        bool dominated = false;
        for (const GridPointResult& o : result.ranked) {
            if (o.index == c.index || o.failed) continue;
            const bool ge = o.accuracy >= c.accuracy && o.fps >= c.fps &&
                            o.fps_per_watt >= c.fps_per_watt && o.epb <= c.epb;
            const bool gt = o.accuracy > c.accuracy || o.fps > c.fps ||
                            o.fps_per_watt > c.fps_per_watt || o.epb < c.epb;
            if (ge && gt) {
                dominated = true;
                break;
            }
        }
        if (!dominated) expected.push_back(c.index);
    }

    std::vector<size_t> got;
    for (const GridPointResult& r : result.pareto) got.push_back(r.index);
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    CHECK(got == expected);

    // No member may dominate another.
    for (const GridPointResult& x : result.pareto)
        for (const GridPointResult& y : result.pareto)
            if (x.index != y.index) CHECK_FALSE(dominates(x, y));
}

TEST_CASE("a failing grid point is recorded without aborting the sweep") {
    const ModelIR model = make_toy_fc(118);
    ExplorationGrid grid;
    grid.sparsities = {0.5};
    grid.cluster_counts = {8};
    grid.arch_configs = {VduConfig{}};
    grid.layer_subsets = {{}, {1}}; // layer 1 is relu: pruning it must fail

    const ExploreResult result =
        explore(model, synthetic_eval(model, 2, 15), grid, DeviceParams{});
    REQUIRE(result.ranked.size() == 2);
    size_t failures = 0;
    for (const GridPointResult& r : result.ranked) {
        if (r.failed) {
            ++failures;
            CHECK(r.error.find("non-parameterized") != std::string::npos);
        }
    }
    CHECK(failures == 1);
}

TEST_CASE("grid validation rejects empty axes and bad cluster counts") {
    ExplorationGrid grid;
    CHECK_THROWS_AS(grid.validate(), ValidationError);
    grid = small_grid();
    grid.cluster_counts = {1 << 17};
    CHECK_THROWS_AS(grid.validate(), ValidationError);
    grid.cluster_counts = {12}; // not a power of two
    CHECK_THROWS_AS(grid.validate(), ValidationError);
    grid.cluster_counts = {1, 2, 65536};
    CHECK_NOTHROW(grid.validate());
}

TEST_CASE("arch sweep ranks by fps-per-watt and respects n-saturation") {
    const ModelIR model = make_toy_cnn(119);
    // Hand-built masks keep at most 4 entries per conv kernel, so no dense
    // kernel vector exceeds 5 lanes.
    MaskedModel masked{model, {}};
    for (size_t li = 0; li < model.layers.size(); ++li) {
        const LayerSpec& l = model.layers[li];
        if (l.kind != LayerKind::Conv2D) continue;
        const Tensor& w = model.tensors.at(l.weight);
        const int64_t kernel_len = l.in_channels * l.kernel_h * l.kernel_w;
        std::vector<uint8_t> mask(static_cast<size_t>(w.size()), 0);
        for (int64_t oc = 0; oc < l.out_channels; ++oc)
            for (int64_t i = 0; i < std::min<int64_t>(4, kernel_len); ++i)
                mask[static_cast<size_t>(oc * kernel_len + i)] = 1;
        masked.masks[li] = std::move(mask);
    }
    const ClusterResult clustered = cluster_weights(masked, 16);
    const Tensor input = synthetic_input(model.input_shape, 21);

    // Confirm the premise.
    const ModelIR eff = clustered.model.effective_model();
    for (const LayerSpec& l : eff.layers) {
        if (l.kind != LayerKind::Conv2D) continue;
        const Tensor& w = eff.tensors.at(l.weight);
        const int64_t kernel_len = l.in_channels * l.kernel_h * l.kernel_w;
        for (int64_t oc = 0; oc < l.out_channels; ++oc) {
            int64_t nnz = 0;
            for (int64_t i = 0; i < kernel_len; ++i) nnz += w[oc * kernel_len + i] != 0.0;
            REQUIRE(nnz <= 5);
        }
    }

    const std::vector<VduConfig> configs = {VduConfig{5, 50, 50, 10},
                                            VduConfig{8, 50, 50, 10}};
    const auto results = sweep_arch(clustered.model, centroid_map(clustered.codebooks),
                                    input, configs, DeviceParams{});
    REQUIRE(results.size() == 2);
    CHECK(results[0].latency_s == results[1].latency_s);
    for (size_t i = 1; i < results.size(); ++i)
        CHECK(results[i - 1].fps_per_watt >= results[i].fps_per_watt);
}

TEST_CASE("explore results render to CSV with one row per point") {
    const ModelIR model = make_toy_fc(120);
    ExplorationGrid grid;
    grid.sparsities = {0.0, 0.5};
    grid.cluster_counts = {8};
    grid.arch_configs = {VduConfig{}};
    const ExploreResult result =
        explore(model, synthetic_eval(model, 2, 17), grid, DeviceParams{});
    const std::string csv = explore_results_to_csv(result.ranked, &result.pareto);
    const size_t rows = static_cast<size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(rows == result.ranked.size() + 1); // header + points
    CHECK(csv.find("pareto") != std::string::npos);
}
