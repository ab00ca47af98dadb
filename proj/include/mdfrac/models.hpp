#pragma once

// End-to-end runs: problem presets, the full-dimensional reference model and
// the four reduced interface models.

#include "mdfrac/assembly.hpp"
#include "mdfrac/fields.hpp"
#include "mdfrac/solver.hpp"
#include "mdfrac/variant.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mdfrac {

struct Problem {
    std::string name;
    FractureFrame frame = FractureFrame::unit_square_vertical();
    ApertureProfile profile = ApertureProfile::constant(0.05, 0.05);
    PermeabilityData permeability;
    ScalarField g = [](const Vec2&) { return 0.0; };
    ScalarField q = [](const Vec2&) { return 0.0; };
    GammaFunction g_gamma = [](double) { return 0.0; };
    GammaFunction q_gamma = [](double) { return 0.0; };
    /// Known pressure (manufactured solutions); empty otherwise.
    ScalarField exact;
    /// Solve the full model on the plain unit square (no fracture elements).
    bool homogeneous = false;
};

/// Names: perp-asym, perp-sym, tangential, manufactured.
/// The interface boundary value defaults to the trace of g on Gamma.
Problem make_preset(const std::string& name, double d0, double xi = 2.0 / 3.0);
std::vector<std::string> preset_names();

/// Sets g_gamma(t) = g(gamma(t)).
void use_trace_of_g_on_gamma(Problem& problem);

struct RunOptions {
    double h = 1.0 / 64.0;
    int degree = 1;
    int interface_degree = 1;
    double mu0_bulk = 10.0;
    double mu0_gamma = 10.0;
    /// Element layers across the fracture in full runs; 0 selects the default.
    int fracture_layers = 0;
    SolveOptions solver;
    EdgeTermForm gamma_edge_terms = EdgeTermForm::consistent;
    EdgeTermForm transport_edge_terms = EdgeTermForm::consistent;
    /// Reduced runs only: pose the variant on this mesh mode instead of the
    /// one from the variant table (rejected by the variant check unless
    /// `allow_mesh_override` is set).
    std::optional<MeshMode> mesh_mode;
    bool allow_mesh_override = false;
};

struct FullSolution {
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const BulkSpace> space;
    BulkField pressure;
    SolveReport report;
    int dofs = 0;
};

struct ReducedSolution {
    ModelVariant variant = ModelVariant::I;
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const InterfaceGrid> grid;
    std::shared_ptr<const BulkSpace> bulk_space;
    std::shared_ptr<const InterfaceSpace> interface_space;
    BulkField bulk;
    InterfaceField interface;
    ApertureProfile profile = ApertureProfile::constant(0.05, 0.05);
    FractureFrame frame = FractureFrame::unit_square_vertical();
    PermeabilityData permeability;
    bool transport_gradients = false;
    WellposednessDiagnostic wellposedness;
    SolveReport report;
    std::vector<std::string> warnings;
    int bulk_dofs = 0;
    int interface_dofs = 0;
};

FullSolution run_full(const Problem& problem, const RunOptions& options);
ReducedSolution run_reduced(const Problem& problem, ModelVariant variant, const RunOptions& options);

/// Builds the mesh, interface grid and spaces of a reduced run and assembles
/// its system without solving.
struct ReducedSetup {
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const InterfaceGrid> grid;
    std::shared_ptr<const BulkSpace> bulk_space;
    std::shared_ptr<const InterfaceSpace> interface_space;
    SparseSystem system;
};
ReducedSetup setup_reduced(const Problem& problem, ModelVariant variant, const RunOptions& options);

/// Tangential effective velocity -K_Gamma (grad(d p_Gamma) - p1 grad d1 - p2 grad d2)
/// at Gamma coordinate t; the gradient terms are dropped unless the variant
/// keeps them in the transport equation.
Vec2 effective_velocity(const ReducedSolution& solution, double t);

/// Bulk traces on Gamma_1 / Gamma_2 (curved) or on Gamma (rectified) at t.
std::pair<double, double> bulk_traces(const ReducedSolution& solution, double t);

}  // namespace mdfrac
