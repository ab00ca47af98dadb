#include "mdfrac/config.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Aperture sweep for reduced fracture flow models"};
    std::string config_path;
    std::string out_dir;
    std::string log_level = "info";
    bool dump_fields = false;
    bool dump_matrices = false;
    app.add_option("config", config_path, "experiment configuration file")->required();
    app.add_option("-o,--out", out_dir, "output directory (overrides the configuration)");
    app.add_option("--log-level", log_level, "quiet, info or debug")
        ->check(CLI::IsMember({"quiet", "info", "debug"}));
    app.add_flag("--dump-fields", dump_fields, "write bulk and interface fields per run");
    app.add_flag("--dump-matrices", dump_matrices, "write reduced system matrices per run");
    CLI11_PARSE(app, argc, argv);

    mdfrac::RunFlags flags;
    if (!out_dir.empty()) {
        flags.out_dir = out_dir;
    }
    flags.log_level = log_level == "quiet"   ? mdfrac::LogLevel::quiet
                      : log_level == "debug" ? mdfrac::LogLevel::debug
                                             : mdfrac::LogLevel::info;
    flags.dump_fields = dump_fields;
    flags.dump_matrices = dump_matrices;

    mdfrac::ExperimentConfig config;
    try {
        config = mdfrac::parse_config(config_path);
    } catch (const mdfrac::ConfigError& ex) {
        std::cerr << config_path << ": " << ex.what() << '\n';
        return 2;
    }
    try {
        return mdfrac::run_experiment(config, flags, std::cout);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
}
