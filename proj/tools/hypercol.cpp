#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypercol/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

int load_config(const std::string& path, nlohmann::json* out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open config file: " << path << "\n";
        return kExitIo;
    }
    try {
        in >> *out;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed JSON in " << path << ": " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

int do_run(const std::string& config_path, const std::string& out_dir, int jobs,
           bool require_render) {
    nlohmann::json config;
    if (int rc = load_config(config_path, &config); rc != kExitOk) return rc;
    if (require_render && (!config.contains("kind") || config["kind"] != "render")) {
        std::cerr << "error: the render command requires a config with kind = render\n";
        return kExitValidation;
    }
    try {
        hypercol::experiment::run(config, out_dir, jobs);
        std::cout << "wrote " << (out_dir.empty()
                                      ? config.value("out_dir", std::string("."))
                                      : out_dir)
                  << "/results.csv\n";
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const hypercol::experiment::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

int do_validate(const std::string& config_path) {
    nlohmann::json config;
    if (int rc = load_config(config_path, &config); rc != kExitOk) return rc;
    const auto violations = hypercol::experiment::validate(config);
    if (violations.empty()) {
        std::cout << "ok\n";
        return kExitOk;
    }
    for (const auto& v : violations) std::cerr << "violation: " << v << "\n";
    return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hypercol: continuum percolation experiments in hyperbolic space"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int jobs = 1;

    auto* run_cmd = app.add_subcommand("run", "execute an experiment config");
    run_cmd->add_option("config", config_path, "path to a JSON config")->required();
    run_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    run_cmd->add_option("--out", out_dir, "output directory (overrides config)");

    auto* validate_cmd = app.add_subcommand("validate", "check a config without running it");
    validate_cmd->add_option("config", config_path, "path to a JSON config")->required();

    auto* render_cmd = app.add_subcommand("render", "draw a sampled realization as SVG");
    render_cmd->add_option("config", config_path, "path to a JSON config with kind = render")
        ->required();
    render_cmd->add_option("--out", out_dir, "output directory (overrides config)");

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand(run_cmd)) return do_run(config_path, out_dir, jobs, false);
    if (app.got_subcommand(validate_cmd)) return do_validate(config_path);
    return do_run(config_path, out_dir, 1, true);
}
