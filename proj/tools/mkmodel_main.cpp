// SPDX-License-Identifier: Apache-2.0
//
// psnn-mkmodel - writes a randomly initialized demo model container, plus an
// optional input tensor file, so the pipeline can be exercised without any
// external training artifacts.

#include <iostream>

#include <CLI11.hpp>

#include "psnn/errors.hpp"
#include "psnn/model_io.hpp"
#include "psnn/model_zoo.hpp"

int main(int argc, char** argv) {
    CLI::App app{"generate a demo model container"};

    std::string preset = "toy-cnn";
    std::string out_dir;
    std::string input_path;
    uint64_t seed = 1;

    app.add_option("--preset", preset, "mnist|cifar10|svhn|toy-cnn|toy-fc")
        ->check(CLI::IsMember({"mnist", "cifar10", "svhn", "toy-cnn", "toy-fc"}));
    app.add_option("--out", out_dir, "container directory to write")->required();
    app.add_option("--input", input_path, "also write a matching input tensor JSON");
    app.add_option("--seed", seed, "weight RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        psnn::ModelIR model = psnn::make_preset(preset, seed);
        psnn::save_model(model, out_dir);
        std::cout << "wrote " << model.name << " (" << psnn::count_parameters(model)
                  << " parameters) to " << out_dir << "\n";
        if (!input_path.empty()) {
            psnn::save_tensor_json(psnn::synthetic_input(model.input_shape, seed), input_path);
            std::cout << "wrote input tensor to " << input_path << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
