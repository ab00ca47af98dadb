#pragma once

// Experiment configuration: a line-based "key = value" format with
// [section] headers, and the driver that executes one configuration.

#include "mdfrac/postproc.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdfrac {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line);
    int line() const { return line_; }

private:
    int line_;
};

struct CustomProblem {
    std::string aperture = "sinusoidal";  // sinusoidal | constant
    Asymmetry asymmetry = Asymmetry::antisymmetric;
    double frequency = 8.0 * 3.14159265358979323846;
    double phase = 0.0;
    /// constant aperture only
    double d1 = 0.05;
    double d2 = 0.05;
    double k_bulk = 1.0;
    double k_fracture = 1.0;
    std::optional<double> k_gamma;
    std::optional<double> k_perp;
    std::string boundary = "affine";  // affine | perp | tangential
    double g_const = 1.0;
    double g_x1 = -1.0;
    double g_x2 = 0.0;
};

struct ExperimentConfig {
    std::string preset = "perp-asym";
    double xi = 2.0 / 3.0;
    /// empty: trace of g on Gamma
    std::optional<double> g_gamma;
    CustomProblem custom;

    std::vector<ModelVariant> variants{ModelVariant::I, ModelVariant::IR, ModelVariant::II, ModelVariant::IIR};
    std::vector<double> d0{0.1, 0.01, 0.001};
    /// empty: full-dimensional reference; otherwise compare against a constant
    std::optional<double> reference_constant;

    double h = 1.0 / 64.0;
    std::optional<double> reference_h;
    std::optional<MeshMode> mesh_mode;
    int fracture_layers = 0;

    int degree = 1;
    int interface_degree = 1;
    double mu0_bulk = 10.0;
    double mu0_gamma = 10.0;
    EdgeTermForm gamma_edge_terms = EdgeTermForm::consistent;
    EdgeTermForm transport_edge_terms = EdgeTermForm::consistent;

    SolveOptions solver;

    std::string output_directory = "out";
    std::string csv_name = "errors.csv";
    std::string log_name = "run.log";
    bool dump_fields = false;
    bool dump_matrices = false;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);

/// Problem for one aperture parameter as described by the configuration.
Problem make_problem(const ExperimentConfig& config, double d0);
RunOptions run_options(const ExperimentConfig& config);

enum class LogLevel { quiet, info, debug };

struct RunFlags {
    std::optional<std::string> out_dir;
    LogLevel log_level = LogLevel::info;
    bool dump_fields = false;
    bool dump_matrices = false;
};

/// Executes the configuration: writes the error table, the run log and any
/// requested dumps under the output directory. Returns 0 if every row
/// succeeded and 1 otherwise.
int run_experiment(const ExperimentConfig& config, const RunFlags& flags, std::ostream& console);

}  // namespace mdfrac
