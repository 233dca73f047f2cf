// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "psnn/cluster.hpp"
#include "psnn/errors.hpp"
#include "psnn/model_zoo.hpp"

using namespace psnn;

TEST_CASE("density init: quantile midpoints on 1..100") {
    std::vector<double> weights(100);
    for (int i = 0; i < 100; ++i) weights[static_cast<size_t>(i)] = i + 1;
    const auto centroids = init_centroids_density(weights, 2);
    REQUIRE(centroids.size() == 2);
    // Quantiles 0.25 and 0.75 with linear interpolation on 100 order
    // statistics: 1 + 0.25*99 = 25.75 and 1 + 0.75*99 = 75.25.
    CHECK(centroids[0] == doctest::Approx(25.75).epsilon(1e-12));
    CHECK(centroids[1] == doctest::Approx(75.25).epsilon(1e-12));
}

TEST_CASE("density init: all-equal weights collapse after clustering") {
    const std::vector<double> weights(17, 3.5);
    const auto centroids = init_centroids_density(weights, 4);
    for (double c : centroids) CHECK(c == 3.5);
    const Codebook book = cluster_values(weights, 4);
    CHECK(book.centroids == std::vector<double>{3.5});
    for (uint32_t a : book.assignments) CHECK(a == 0);
}

TEST_CASE("density init: equally frequent distinct values map to themselves") {
    const std::vector<double> weights = {1.0, 1.0, 2.0, 2.0, 3.0, 3.0};
    const auto centroids = init_centroids_density(weights, 3);
    REQUIRE(centroids.size() == 3);
    CHECK(centroids[0] == doctest::Approx(1.0));
    CHECK(centroids[1] == doctest::Approx(2.0));
    CHECK(centroids[2] == doctest::Approx(3.0));
}

TEST_CASE("density init rejects empty input") {
    CHECK_THROWS_AS(init_centroids_density({}, 2), ValidationError);
}

TEST_CASE("two well-separated pairs cluster to their means") {
    const std::vector<double> weights = {1.0, 1.1, 5.0, 5.1};
    const Codebook book = cluster_values(weights, 2);
    REQUIRE(book.centroids.size() == 2);
    CHECK(book.centroids[0] == doctest::Approx(1.05).epsilon(1e-12));
    CHECK(book.centroids[1] == doctest::Approx(5.05).epsilon(1e-12));

    // The exhaustive-partition optimum agrees here.
    std::vector<double> optimal_means;
    oracle::kmeans1d_optimal(weights, 2, &optimal_means);
    CHECK(book.centroids[0] == doctest::Approx(optimal_means[0]).epsilon(1e-12));
    CHECK(book.centroids[1] == doctest::Approx(optimal_means[1]).epsilon(1e-12));
}

TEST_CASE("lloyd reaches the exhaustive optimum on curated small sets") {
    const std::vector<std::vector<double>> cases = {
        {0.0, 0.1, 0.9, 1.0, 4.0, 4.2},
        {-3.0, -2.9, 0.0, 2.9, 3.0},
        {10.0, 20.0, 30.0, 40.0},
    };
    const int cluster_counts[] = {3, 3, 2};
    for (size_t i = 0; i < cases.size(); ++i) {
        const Codebook book = cluster_values(cases[i], cluster_counts[i]);
        double wcss = 0.0;
        for (size_t j = 0; j < cases[i].size(); ++j) {
            // assignments follow sorted value order inside cluster_values'
            // input order (already sorted in these cases)
            const double d = cases[i][j] - book.centroids[book.assignments[j]];
            wcss += d * d;
        }
        const double optimal = oracle::kmeans1d_optimal(cases[i], cluster_counts[i]);
        CHECK(wcss == doctest::Approx(optimal).epsilon(1e-9));
    }
}

TEST_CASE("C at least the distinct count is a fixed point") {
    const std::vector<double> weights = {0.25, -0.5, 0.75, 0.125, -0.25};
    const Codebook book = cluster_values(weights, 8);
    for (size_t i = 0; i < weights.size(); ++i)
        CHECK(book.centroids[book.assignments[i]] == doctest::Approx(weights[i]));
}

TEST_CASE("within-cluster squared error never increases across iterations") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> values(200);
        for (double& v : values) v = std::uniform_real_distribution<>(-2.0, 2.0)(rng);
        std::vector<double> wcss;
        cluster_values(values, 8, &wcss);
        for (size_t i = 1; i < wcss.size(); ++i) CHECK(wcss[i] <= wcss[i - 1] + 1e-12);
    }
}

TEST_CASE("clustering is deterministic") {
    std::mt19937_64 rng(18);
    std::vector<double> values(500);
    for (double& v : values) v = std::uniform_real_distribution<>(-1.0, 1.0)(rng);
    const Codebook a = cluster_values(values, 16);
    const Codebook b = cluster_values(values, 16);
    CHECK(a.centroids == b.centroids);
    CHECK(a.assignments == b.assignments);
}

TEST_CASE("cluster_weights bounds distinct nonzero values per layer") {
    const ModelIR model = make_cifar10_like();
    const MaskedModel masked = prune(model, SparsityPlan::uniform(model, 0.5));
    const ClusterResult result = cluster_weights(masked, 16);

    for (const auto& [idx, book] : result.codebooks) {
        CHECK(book.size() <= 16);
        const Tensor& w = result.model.base.tensors.at(model.layers[idx].weight);
        const auto& mask = result.model.masks.at(idx);
        std::set<double> distinct;
        for (int64_t i = 0; i < w.size(); ++i)
            if (mask[static_cast<size_t>(i)] && w[i] != 0.0) distinct.insert(w[i]);
        CHECK(distinct.size() <= 16);
    }
    CHECK(result.codebooks.size() == 7);
}

TEST_CASE("pruned zeros take no part in clustering and stay zero") {
    const ModelIR model = make_toy_fc(71);
    const MaskedModel masked = prune(model, SparsityPlan::uniform(model, 0.5));
    const ClusterResult result = cluster_weights(masked, 4);

    for (const auto& [idx, mask] : masked.masks) {
        const Tensor& w = result.model.base.tensors.at(model.layers[idx].weight);
        for (int64_t i = 0; i < w.size(); ++i)
            if (!mask[static_cast<size_t>(i)]) CHECK(w[i] == 0.0);
        CHECK(result.model.masks.at(idx) == mask);
    }
}

TEST_CASE("a fully pruned layer is skipped with a warning") {
    const ModelIR model = make_toy_fc(72);
    SparsityPlan plan;
    plan.entries[0] = 1.0;
    const MaskedModel masked = prune(model, plan);
    const ClusterResult result = cluster_weights(masked, 4);
    CHECK(result.codebooks.count(0) == 0);
    CHECK(result.codebooks.count(2) == 1);
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].find("layer 0") != std::string::npos);
}

TEST_CASE("required_dac_bits") {
    CHECK(required_dac_bits(64).bits == 6);
    CHECK(required_dac_bits(16).bits == 4);
    CHECK(required_dac_bits(1).bits == 1);
    CHECK(required_dac_bits(2).bits == 1);
    CHECK(required_dac_bits(3).bits == 2);
    CHECK(required_dac_bits(65).bits == 7);
    CHECK_THROWS_AS(required_dac_bits(0), ValidationError);
}
