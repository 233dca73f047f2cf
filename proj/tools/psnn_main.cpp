// SPDX-License-Identifier: Apache-2.0
//
// psnn - batch front end for the sparse photonic inference pipeline:
//   prune -> cluster -> compress/simulate/explore -> report
// Stages communicate through model containers on disk, so any prefix of the
// pipeline can be resumed or inspected.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "psnn/cluster.hpp"
#include "psnn/config.hpp"
#include "psnn/dataflow.hpp"
#include "psnn/errors.hpp"
#include "psnn/explore.hpp"
#include "psnn/model_io.hpp"
#include "psnn/model_zoo.hpp"
#include "psnn/reference.hpp"
#include "psnn/report.hpp"
#include "psnn/schedule.hpp"
#include "psnn/sparsify.hpp"

namespace {

// Exit codes: 0 ok, 2 config/usage, 3 I/O or missing input, 4 stage failure.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitStage = 4;

struct CommonOpts {
    std::string model_dir;
    std::string config_path;
    std::string out_path;
    std::string format = "text";
};

psnn::RunConfig load_config(const CommonOpts& opts) {
    if (opts.config_path.empty()) return psnn::RunConfig{};
    return psnn::parse_config_file(opts.config_path);
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw psnn::IoError("cannot write output file: " + path);
    out << content;
    if (!out) throw psnn::IoError("output write failed: " + path);
}

psnn::Tensor resolve_input(const std::string& input_path, const psnn::ModelIR& model,
                           uint64_t seed) {
    if (!input_path.empty()) return psnn::load_tensor_json(input_path);
    return psnn::synthetic_input(model.input_shape, seed);
}

void print_arch_warnings(const psnn::VduConfig& arch) {
    for (const std::string& w : arch.warnings())
        std::cerr << "warning: " << w << "\n";
}

int cmd_prune(const CommonOpts& opts, double sparsity_flag) {
    if (opts.out_path.empty()) throw psnn::ConfigError("prune requires --out");
    psnn::RunConfig cfg = load_config(opts);
    if (sparsity_flag >= 0.0) cfg.uniform_sparsity = sparsity_flag;

    psnn::StoredModel stored = psnn::load_container(opts.model_dir);
    // Re-pruning an already pruned container operates on the effective
    // weights, which keeps repeated prune stages idempotent.
    const psnn::ModelIR base = stored.masked().effective_model();
    const psnn::SparsityPlan plan = cfg.sparsity_plan(base);
    if (plan.entries.empty())
        throw psnn::ConfigError("no sparsity given (use --sparsity or a config file)");

    psnn::MaskedModel masked = psnn::prune(base, plan);
    psnn::save_container(psnn::StoredModel{masked.base, masked.masks, stored.codebooks},
                         opts.out_path);

    std::cout << "model: " << base.name << "\n";
    std::cout << "parameters: " << psnn::count_parameters(base) << "\n";
    for (const auto& [idx, s] : plan.entries) {
        uint64_t survivors = 0;
        for (uint8_t bit : masked.masks.at(idx)) survivors += bit;
        std::printf("layer %zu: sparsity %.4f, surviving %llu\n", idx, s,
                    static_cast<unsigned long long>(survivors));
    }
    std::cout << "surviving weights: " << psnn::count_nonzero(masked) << "\n";
    return kExitOk;
}

int cmd_cluster(const CommonOpts& opts, int clusters_flag) {
    if (opts.out_path.empty()) throw psnn::ConfigError("cluster requires --out");
    psnn::RunConfig cfg = load_config(opts);
    const int clusters = clusters_flag > 0 ? clusters_flag : cfg.clusters;

    psnn::StoredModel stored = psnn::load_container(opts.model_dir);
    psnn::ClusterResult result = psnn::cluster_weights(stored.masked(), clusters);
    for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";

    psnn::save_container(psnn::StoredModel{result.model.base, result.model.masks,
                                           psnn::centroid_map(result.codebooks)},
                         opts.out_path);

    size_t max_clusters = 1;
    for (const auto& [idx, book] : result.codebooks) {
        std::cout << "layer " << idx << ": " << book.size() << " clusters\n";
        max_clusters = std::max(max_clusters, book.size());
    }
    std::cout << "weight dac bits: "
              << psnn::required_dac_bits(static_cast<int>(max_clusters)).bits << "\n";
    return kExitOk;
}

int cmd_compress(const CommonOpts& opts, const std::string& input_path, uint64_t seed) {
    psnn::StoredModel stored = psnn::load_container(opts.model_dir);
    const psnn::ModelIR model = stored.masked().effective_model();
    psnn::Tensor act = resolve_input(input_path, model, seed);

    std::ostringstream csv;
    csv << "layer,kind,work_items,driver_length,dense_length,zeros_eliminated,"
           "residual_zero_fraction\n";
    for (size_t li = 0; li < model.layers.size(); ++li) {
        const psnn::LayerSpec& layer = model.layers[li];
        std::vector<psnn::CompressedGemm> work;
        int64_t driver_len = 0;
        if (layer.kind == psnn::LayerKind::Conv2D) {
            auto unrolled = psnn::unroll_conv(model.tensors.at(layer.weight), act,
                                              layer.stride, layer.padding);
            driver_len = layer.in_channels * layer.kernel_h * layer.kernel_w;
            work = psnn::compress_conv(unrolled);
        } else if (layer.kind == psnn::LayerKind::FullyConnected) {
            psnn::Tensor flat({act.size()}, {act.data().begin(), act.data().end()});
            driver_len = layer.in_dim;
            work.push_back(psnn::compress_fc(model.tensors.at(layer.weight), flat.data()));
        }
        if (!work.empty()) {
            uint64_t dense = 0, residual_zero = 0, residual_total = 0;
            for (const auto& item : work) {
                dense += item.dense.size();
                for (const auto& row : item.rows) {
                    residual_total += row.size();
                    for (double v : row) residual_zero += v == 0.0;
                }
            }
            const uint64_t uncompressed =
                static_cast<uint64_t>(driver_len) * work.size();
            char frac[32];
            std::snprintf(frac, sizeof(frac), "%.6f",
                          residual_total ? static_cast<double>(residual_zero) /
                                               static_cast<double>(residual_total)
                                         : 0.0);
            csv << li << "," << psnn::layer_kind_name(layer.kind) << "," << work.size()
                << "," << driver_len << "," << dense << "," << (uncompressed - dense)
                << "," << frac << "\n";
        }
        // Advance activations so downstream layers see real sparsity.
        psnn::ModelIR single;
        single.name = model.name;
        single.input_shape = act.shape();
        single.layers = {layer};
        for (const std::string* name :
             {&layer.weight, &layer.bias, &layer.bn_scale, &layer.bn_shift})
            if (!name->empty()) single.tensors.emplace(*name, model.tensors.at(*name));
        act = psnn::reference_forward(single, act);
    }
    write_output(opts.out_path, csv.str());
    return kExitOk;
}

int cmd_simulate(const CommonOpts& opts, const std::string& input_path, uint64_t seed,
                 bool exact_mode) {
    psnn::RunConfig cfg = load_config(opts);
    psnn::StoredModel stored = psnn::load_container(opts.model_dir);
    psnn::Tensor input = resolve_input(input_path, stored.model, seed);
    print_arch_warnings(cfg.arch);

    psnn::SimOptions sim_opts;
    sim_opts.exact_mode = exact_mode;
    psnn::SimulationResult result = psnn::simulate(stored.masked(), stored.codebooks, input,
                                                   cfg.arch, cfg.device, sim_opts);

    std::string rendered;
    if (opts.format == "text") rendered = psnn::report_to_text(result.report);
    else if (opts.format == "json") rendered = psnn::report_to_json(result.report);
    else if (opts.format == "csv") rendered = psnn::report_to_csv(result.report);
    else throw psnn::ConfigError("unknown format: " + opts.format);
    write_output(opts.out_path, rendered);
    return kExitOk;
}

int cmd_explore(const CommonOpts& opts, uint64_t seed, int jobs) {
    psnn::RunConfig cfg = load_config(opts);
    psnn::StoredModel stored = psnn::load_container(opts.model_dir);
    const psnn::ModelIR model = stored.masked().effective_model();

    psnn::ExplorationGrid grid = cfg.grid;
    if (grid.sparsities.empty()) grid.sparsities = {0.0, 0.3, 0.5, 0.7};
    if (grid.cluster_counts.empty()) grid.cluster_counts = {16, 64};
    if (grid.arch_configs.empty()) grid.arch_configs = {cfg.arch};

    std::vector<psnn::EvalSample> eval_set;
    for (size_t i = 0; i < cfg.eval_count; ++i)
        eval_set.push_back({psnn::synthetic_input(model.input_shape, seed + i), -1});

    psnn::ExploreResult result = psnn::explore(model, eval_set, grid, cfg.device, jobs);
    write_output(opts.out_path, psnn::explore_results_to_csv(result.ranked, &result.pareto));
    if (!result.ranked.empty() && !result.ranked.front().failed) {
        const psnn::GridPointResult& best = result.ranked.front();
        std::cerr << "best by " << psnn::objective_name(grid.objective) << ": sparsity "
                  << best.sparsity << ", clusters " << best.clusters << ", arch "
                  << best.arch.conv_width << "x" << best.arch.fc_width << "x"
                  << best.arch.conv_units << "x" << best.arch.fc_units << "\n";
    }
    return kExitOk;
}

int cmd_report(const CommonOpts& opts, const std::string& in_path) {
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw psnn::IoError("cannot open report: " + in_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    psnn::SimReport report = psnn::report_from_json(buf.str());
    report.check_identities();

    std::string rendered;
    if (opts.format == "text") rendered = psnn::report_to_text(report);
    else if (opts.format == "json") rendered = psnn::report_to_json(report);
    else if (opts.format == "csv") rendered = psnn::report_to_csv(report);
    else throw psnn::ConfigError("unknown format: " + opts.format);
    write_output(opts.out_path, rendered);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse photonic neural-network inference simulator"};
    app.require_subcommand(1);

    CommonOpts opts;
    double sparsity_flag = -1.0;
    int clusters_flag = 0;
    std::string input_path;
    std::string report_in;
    uint64_t seed = 1234;
    int jobs = 1;
    bool exact_mode = false;

    auto add_common = [&](CLI::App* sub, bool needs_model = true) {
        if (needs_model)
            sub->add_option("--model", opts.model_dir, "model container directory")
                ->required();
        sub->add_option("--config", opts.config_path, "config file (dotted keys)");
        sub->add_option("--out", opts.out_path, "output path");
        sub->add_option("--format", opts.format, "text|json|csv")
            ->check(CLI::IsMember({"text", "json", "csv"}));
    };

    CLI::App* prune = app.add_subcommand("prune", "magnitude-prune layer weights");
    add_common(prune);
    prune->add_option("--sparsity", sparsity_flag, "uniform sparsity in [0,1]");

    CLI::App* cluster = app.add_subcommand("cluster", "cluster surviving weights");
    add_common(cluster);
    cluster->add_option("--clusters", clusters_flag, "cluster count C");

    CLI::App* compress = app.add_subcommand("compress", "dump compression statistics CSV");
    add_common(compress);
    compress->add_option("--input", input_path, "input tensor JSON");
    compress->add_option("--seed", seed, "synthetic input seed");

    CLI::App* simulate = app.add_subcommand("simulate", "run the photonic inference model");
    add_common(simulate);
    simulate->add_option("--input", input_path, "input tensor JSON");
    simulate->add_option("--seed", seed, "synthetic input seed");
    simulate->add_flag("--exact-mode", exact_mode, "bypass quantization");

    CLI::App* explore = app.add_subcommand("explore", "sweep the optimization design space");
    add_common(explore);
    explore->add_option("--seed", seed, "synthetic eval-set seed");
    explore->add_option("--jobs", jobs, "parallel grid evaluations")->check(CLI::PositiveNumber);

    CLI::App* report = app.add_subcommand("report", "re-render a JSON report");
    add_common(report, /*needs_model=*/false);
    report->add_option("--in", report_in, "report JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (prune->parsed()) return cmd_prune(opts, sparsity_flag);
        if (cluster->parsed()) return cmd_cluster(opts, clusters_flag);
        if (compress->parsed()) return cmd_compress(opts, input_path, seed);
        if (simulate->parsed()) return cmd_simulate(opts, input_path, seed, exact_mode);
        if (explore->parsed()) return cmd_explore(opts, seed, jobs);
        if (report->parsed()) return cmd_report(opts, report_in);
    } catch (const psnn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const psnn::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const psnn::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStage;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
