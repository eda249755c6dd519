#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ecosim/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Evolutionary ecosystem simulator"};
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicates;
    std::optional<std::string> out_dir;
    std::optional<std::string> experiment;
    app.add_option("--config", config_path, "INI experiment configuration")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "master seed");
    app.add_option("--replicates", replicates, "replicate count");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--experiment", experiment,
                   "evolve|complexity|clustering|stability|sweep|diversity-length|diversity-modularity|habitat");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        ecosim::ExperimentConfig cfg = config_path.empty() ? ecosim::ExperimentConfig{}
                                                           : ecosim::load_config(config_path);
        if (experiment) {
            cfg.kind = ecosim::parse_kind(*experiment);
        }
        if (seed) {
            cfg.seed = ecosim::RngSeed{*seed};
        }
        if (replicates) {
            cfg.replicates = *replicates;
        }
        if (out_dir) {
            cfg.out_dir = *out_dir;
        }
        const auto summary = ecosim::run_experiment(cfg);
        std::cout << summary.dump(2) << "\n";
        return 0;
    } catch (const ecosim::ConfigError& e) {
        std::cerr << fmt::format("config error in {}: {}\n", e.field(), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
