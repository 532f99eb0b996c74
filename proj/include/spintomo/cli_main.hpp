#pragma once

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spintomo/cli_commands.hpp"

namespace spintomo {

// Exit codes: 0 success, 2 configuration error, 3 numeric cross-check failure.
inline int cli_main(int argc, const char* const* argv) {
    CLI::App app{"spin tomography toolkit: tomograms, entanglement indicators, squeezing, NMR dynamics"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool exact = false;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "64-bit RNG seed")->each([&](const std::string&) { seed_set = true; });
    app.add_flag("--exact", exact, "use exact probabilities instead of shot sampling");

    auto* exp = app.add_subcommand("experiment", "run an experiment preset and write timeseries.csv");
    std::string case_label;
    exp->add_option("--case", case_label, "preset case label (I, II-i, II-ii, II-iii, III-A..III-D)");

    auto* ana = app.add_subcommand("analyze-tomogram", "compute indicators and squeezing from a tomogram file");
    std::string tomogram_path, bipartition_spec;
    ana->add_option("path", tomogram_path, "tomogram file")->required();
    ana->add_option("--bipartition", bipartition_spec, "e.g. 0|1 or 0,1|2 (default: qubit 0 vs rest)");

    auto* cir = app.add_subcommand("circuit", "simulate the equivalent circuits with shot sampling");
    double theta = std::numbers::pi / 2.0;
    std::string variant = "equivalent";
    std::uint64_t n_shots = 0;
    int repetitions = 0;
    cir->add_option("--theta", theta, "interaction angle, [0, pi)");
    cir->add_option("--variant", variant, "equivalent | theta_zero | compact");
    cir->add_option("--shots", n_shots, "shots per basis set");
    cir->add_option("--repetitions", repetitions, "independent repetitions");

    auto* lst = app.add_subcommand("list-presets", "print the built-in experiment presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = parse_config_json(config_path);
        if (seed_set) cfg.seed = seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (exact) cfg.exact = true;

        if (lst->parsed()) {
            cmd_list_presets(std::cout);
            return 0;
        }
        if (exp->parsed()) {
            if (!case_label.empty()) cfg.case_label = case_label;
            if (cfg.case_label.empty()) {
                throw ConfigError("experiment: no case label given (use --case or the config file); valid: I, II-i, "
                                  "II-ii, II-iii, III-A, III-B, III-C, III-D");
            }
            cmd_experiment(cfg);
            return 0;
        }
        if (ana->parsed()) {
            cmd_analyze_tomogram(tomogram_path, bipartition_spec, cfg);
            return 0;
        }
        if (cir->parsed()) {
            if (cir->count("--theta") > 0) cfg.theta = theta;
            if (cir->count("--variant") > 0) cfg.variant = variant;
            if (n_shots > 0) cfg.n_shots = n_shots;
            if (repetitions > 0) cfg.repetitions = repetitions;
            cmd_circuit(cfg);
            return 0;
        }
        return 2;
    } catch (const CrossCheckError& e) {
        std::cerr << "cross-check failure: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace spintomo
