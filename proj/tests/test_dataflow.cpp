// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "psnn/dataflow.hpp"
#include "psnn/errors.hpp"

using namespace psnn;

namespace {

std::vector<double> random_values(std::mt19937_64& rng, size_t n, double zero_prob) {
    std::uniform_real_distribution<> value(-1.0, 1.0);
    std::uniform_real_distribution<> coin(0.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = coin(rng) < zero_prob ? 0.0 : value(rng);
    return v;
}

// Evaluates a CompressedGemm against its aligned rows.
std::vector<double> eval_compressed(const CompressedGemm& g) {
    std::vector<double> out(static_cast<size_t>(g.output_dim), 0.0);
    for (int64_t r = 0; r < g.output_dim; ++r)
        for (size_t j = 0; j < g.dense.size(); ++j)
            out[static_cast<size_t>(r)] += g.dense[j] * g.rows[static_cast<size_t>(r)][j];
    return out;
}

// Evaluates through chunk_work, accumulating chunk-major.
std::vector<double> eval_chunked(const CompressedGemm& g, int chunk) {
    std::vector<double> out(static_cast<size_t>(g.output_dim), 0.0);
    for (const WorkChunk& wc : chunk_work(g, chunk)) {
        double partial = 0.0;
        for (size_t i = 0; i < wc.dense.size(); ++i) partial += wc.dense[i] * wc.sparse[i];
        out[static_cast<size_t>(wc.row)] += partial;
    }
    return out;
}

} // namespace

TEST_CASE("compress_fc removes zero activations and their columns") {
    const Tensor w({2, 2}, {1, 2, 3, 4});
    const std::vector<double> a = {0.0, 5.0};
    const CompressedGemm g = compress_fc(w, a);
    CHECK(g.dense == std::vector<double>{5.0});
    CHECK(g.dense_index == std::vector<int64_t>{1});
    REQUIRE(g.rows.size() == 2);
    CHECK(g.rows[0] == std::vector<double>{2.0});
    CHECK(g.rows[1] == std::vector<double>{4.0});
    CHECK(eval_compressed(g) == std::vector<double>{10.0, 20.0});
}

TEST_CASE("compress_fc with a dense activation vector is the identity") {
    const Tensor w({2, 3}, {1, 2, 3, 4, 5, 6});
    const std::vector<double> a = {1.0, -2.0, 3.0};
    const CompressedGemm g = compress_fc(w, a);
    CHECK(g.dense == a);
    CHECK(g.rows[0] == std::vector<double>{1, 2, 3});
    CHECK(g.rows[1] == std::vector<double>{4, 5, 6});
}

TEST_CASE("compress_fc with an all-zero activation yields empty work") {
    const Tensor w({3, 2}, {1, 2, 3, 4, 5, 6});
    const CompressedGemm g = compress_fc(w, std::vector<double>{0.0, 0.0});
    CHECK(g.dense.empty());
    CHECK(g.output_dim == 3);
    CHECK(eval_compressed(g) == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("compress_fc preserves the product on random sparse inputs") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        const int64_t out = std::uniform_int_distribution<int64_t>(1, 24)(rng);
        const int64_t in = std::uniform_int_distribution<int64_t>(1, 24)(rng);
        const auto wv = random_values(rng, static_cast<size_t>(out * in), 0.3);
        const auto av = random_values(rng, static_cast<size_t>(in), 0.5);
        const Tensor w({out, in}, wv);

        const auto got = eval_compressed(compress_fc(w, av));
        const auto expect = oracle::gemv(wv, out, in, av);
        for (int64_t o = 0; o < out; ++o)
            CHECK(got[static_cast<size_t>(o)] ==
                  doctest::Approx(expect[static_cast<size_t>(o)]).epsilon(1e-9));
    }
}

TEST_CASE("unroll_conv: 1x1 kernel stride 1 flattens the map") {
    const Tensor k({1, 1, 1, 1}, {3.0});
    const Tensor x({1, 2, 2}, {1, 2, 3, 4});
    const UnrolledConv u = unroll_conv(k, x, 1, 0);
    REQUIRE(u.patch_columns.size() == 4);
    for (int64_t p = 0; p < 4; ++p) {
        REQUIRE(u.patch_columns[static_cast<size_t>(p)].size() == 1);
        CHECK(u.patch_columns[static_cast<size_t>(p)][0] == x[p]);
    }
}

TEST_CASE("unroll_conv: 2x2 ones kernel over 3x3 ones map gives fours") {
    const Tensor k({1, 1, 2, 2}, {1, 1, 1, 1});
    const Tensor x({1, 3, 3}, std::vector<double>(9, 1.0));
    const UnrolledConv u = unroll_conv(k, x, 1, 0);
    CHECK(u.out_h == 2);
    CHECK(u.out_w == 2);
    for (const auto& patch : u.patch_columns) {
        double dot = 0.0;
        for (size_t i = 0; i < 4; ++i) dot += u.kernel_vectors[0][i] * patch[i];
        CHECK(dot == 4.0);
    }
}

TEST_CASE("unrolled dot products reproduce the convolution oracle") {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 20; ++trial) {
        const int64_t ic = std::uniform_int_distribution<int64_t>(1, 3)(rng);
        const int64_t oc = std::uniform_int_distribution<int64_t>(1, 4)(rng);
        const int64_t h = std::uniform_int_distribution<int64_t>(3, 8)(rng);
        const int64_t k = std::uniform_int_distribution<int64_t>(1, 3)(rng);
        const int64_t stride = std::uniform_int_distribution<int64_t>(1, 2)(rng);
        const int64_t pad = std::uniform_int_distribution<int64_t>(0, 1)(rng);

        const auto kv = random_values(rng, static_cast<size_t>(oc * ic * k * k), 0.0);
        const auto xv = random_values(rng, static_cast<size_t>(ic * h * h), 0.0);
        const UnrolledConv u =
            unroll_conv(Tensor({oc, ic, k, k}, kv), Tensor({ic, h, h}, xv), stride, pad);

        int64_t oh = 0, ow = 0;
        const auto expect = oracle::conv2d(kv, oc, ic, k, k, xv, h, h, stride, pad, oh, ow);
        REQUIRE(u.out_h == oh);
        REQUIRE(u.out_w == ow);
        for (int64_t c = 0; c < oc; ++c)
            for (int64_t p = 0; p < oh * ow; ++p) {
                double dot = 0.0;
                const auto& patch = u.patch_columns[static_cast<size_t>(p)];
                for (size_t i = 0; i < patch.size(); ++i)
                    dot += u.kernel_vectors[static_cast<size_t>(c)][i] * patch[i];
                CHECK(dot ==
                      doctest::Approx(expect[static_cast<size_t>(c * oh * ow + p)])
                          .epsilon(1e-9));
            }
    }
}

TEST_CASE("compress_conv removes zero kernel entries with their patch rows") {
    const Tensor k({1, 3, 1, 1}, {1.0, 0.0, 2.0});
    const Tensor x({3, 1, 2}, {10, 11, 20, 21, 30, 31});
    const UnrolledConv u = unroll_conv(k, x, 1, 0);
    const auto items = compress_conv(u);
    REQUIRE(items.size() == 1);
    CHECK(items[0].dense == std::vector<double>{1.0, 2.0});
    CHECK(items[0].dense_index == std::vector<int64_t>{0, 2});
    CHECK(items[0].rows[0] == std::vector<double>{10.0, 30.0});
    CHECK(items[0].rows[1] == std::vector<double>{11.0, 31.0});
}

TEST_CASE("compress_conv on a dense kernel is the identity transform") {
    const Tensor k({2, 1, 2, 2}, {1, 2, 3, 4, 5, 6, 7, 8});
    const Tensor x({1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    const auto items = compress_conv(unroll_conv(k, x, 1, 0));
    REQUIRE(items.size() == 2);
    for (const auto& item : items) CHECK(item.dense.size() == 4);
}

TEST_CASE("compress_conv with an all-zero kernel emits an empty work item") {
    const Tensor k({1, 1, 2, 2}, {0, 0, 0, 0});
    const Tensor x({1, 3, 3}, std::vector<double>(9, 1.0));
    const auto items = compress_conv(unroll_conv(k, x, 1, 0));
    REQUIRE(items.size() == 1);
    CHECK(items[0].dense.empty());
    CHECK(items[0].output_dim == 4);
}

TEST_CASE("pruned random kernels keep exact per-pixel dot products") {
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 20; ++trial) {
        const int64_t ic = 3, oc = 2, h = 6, k = 3;
        auto kv = random_values(rng, static_cast<size_t>(oc * ic * k * k), 0.6);
        const auto xv = random_values(rng, static_cast<size_t>(ic * h * h), 0.2);
        const UnrolledConv u =
            unroll_conv(Tensor({oc, ic, k, k}, kv), Tensor({ic, h, h}, xv), 1, 1);
        int64_t oh = 0, ow = 0;
        const auto expect = oracle::conv2d(kv, oc, ic, k, k, xv, h, h, 1, 1, oh, ow);

        const auto items = compress_conv(u);
        for (int64_t c = 0; c < oc; ++c) {
            for (double v : items[static_cast<size_t>(c)].dense) CHECK(v != 0.0);
            const auto got = eval_compressed(items[static_cast<size_t>(c)]);
            for (int64_t p = 0; p < oh * ow; ++p)
                CHECK(got[static_cast<size_t>(p)] ==
                      doctest::Approx(expect[static_cast<size_t>(c * oh * ow + p)])
                          .epsilon(1e-9));
        }
    }
}

TEST_CASE("chunk_work splits, pads and re-concatenates") {
    CompressedGemm g;
    g.output_dim = 1;
    for (int i = 1; i <= 12; ++i) {
        g.dense.push_back(i);
        g.dense_index.push_back(i - 1);
    }
    g.rows = {std::vector<double>(12, 2.0)};

    const auto chunks = chunk_work(g, 5);
    REQUIRE(chunks.size() == 3);
    CHECK(chunks[2].valid == 2);
    CHECK(chunks[2].dense == std::vector<double>{11, 12, 0, 0, 0});
    CHECK(chunks[2].sparse == std::vector<double>{2, 2, 0, 0, 0});

    // Re-concatenation reproduces the original vectors.
    std::vector<double> dense_rejoined, sparse_rejoined;
    for (const WorkChunk& wc : chunks) {
        dense_rejoined.insert(dense_rejoined.end(), wc.dense.begin(),
                              wc.dense.begin() + wc.valid);
        sparse_rejoined.insert(sparse_rejoined.end(), wc.sparse.begin(),
                               wc.sparse.begin() + wc.valid);
    }
    CHECK(dense_rejoined == g.dense);
    CHECK(sparse_rejoined == g.rows[0]);
}

TEST_CASE("chunk_work exact-fit leaves no padding") {
    CompressedGemm g;
    g.output_dim = 1;
    g.dense = {1, 2, 3, 4, 5};
    g.dense_index = {0, 1, 2, 3, 4};
    g.rows = {{9, 8, 7, 6, 5}};
    const auto chunks = chunk_work(g, 5);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].valid == 5);
}

TEST_CASE("chunk count matches ceil(L/chunk) across lengths") {
    std::mt19937_64 rng(404);
    for (int chunk : {1, 3, 5, 8}) {
        for (int64_t len = 1; len <= 10 * chunk; ++len) {
            CHECK(chunk_count(len, chunk) == (len + chunk - 1) / chunk);
        }
        (void)rng;
    }
}

TEST_CASE("chunked evaluation equals the dense product on random layers") {
    std::mt19937_64 rng(505);
    for (int trial = 0; trial < 30; ++trial) {
        const int64_t out = std::uniform_int_distribution<int64_t>(1, 16)(rng);
        const int64_t in = std::uniform_int_distribution<int64_t>(1, 64)(rng);
        const auto wv = random_values(rng, static_cast<size_t>(out * in), 0.4);
        const auto av = random_values(rng, static_cast<size_t>(in), 0.4);
        const CompressedGemm g = compress_fc(Tensor({out, in}, wv), av);
        const int chunk = std::uniform_int_distribution<int>(1, 10)(rng);

        const auto expect = oracle::gemv(wv, out, in, av);
        const auto got = eval_chunked(g, chunk);
        for (int64_t o = 0; o < out; ++o)
            CHECK(got[static_cast<size_t>(o)] ==
                  doctest::Approx(expect[static_cast<size_t>(o)]).epsilon(1e-9));
    }
}

TEST_CASE("geometry validation") {
    CHECK_THROWS_AS(compress_fc(Tensor({2, 2}, {1, 2, 3, 4}), std::vector<double>{1.0}),
                    ValidationError);
    CHECK_THROWS_AS(unroll_conv(Tensor({1, 2, 1, 1}, {1, 2}),
                                Tensor({1, 2, 2}, {1, 2, 3, 4}), 1, 0),
                    ValidationError);
    CHECK_THROWS_AS(chunk_count(5, 0), ValidationError);
}
