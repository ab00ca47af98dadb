#pragma once

// Comparison quantities: fracture-averaged reference pressure, L2 errors on
// Gamma, aperture sweeps and field dumps.

#include "mdfrac/models.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace mdfrac {

/// (1 / d(t)) * integral of p over the transversal segment [-d1(t), d2(t)] at
/// t, using the analytic aperture for the endpoints. The segment is split at
/// element boundaries and each piece integrated with n_quad Gauss points.
double average_across_fracture(const BulkField& field, const ApertureProfile& profile, const FractureFrame& frame,
                               double t, int n_quad = 16);

/// Callable p_Gamma^ref(t) bound to one full solution.
GammaFunction fracture_average(const FullSolution& full, const ApertureProfile& profile,
                               const FractureFrame& frame, int n_quad = 16);

/// sqrt(sum over interface elements of the quadrature of (a - b)^2).
double l2_error_gamma(const GammaFunction& a, const GammaFunction& b, const InterfaceGrid& grid, int order = 12);

GammaFunction as_function(const InterfaceField& field);

/// L2 norm of field - exact over the bulk mesh.
double l2_error_bulk(const BulkField& field, const ScalarField& exact, int extra_order = 4);

struct ErrorRow {
    double d0 = 0.0;
    ModelVariant variant = ModelVariant::I;
    double l2_error = 0.0;
    int bulk_dofs = 0;
    int interface_dofs = 0;
    double residual = 0.0;
    double wellposedness_lhs = 0.0;
    bool ok = true;
    std::string message;
};

struct ErrorTable {
    std::vector<ErrorRow> rows;

    const ErrorRow* find(double d0, ModelVariant variant) const;
    bool all_ok() const;
    /// Header d0,variant,l2_error,bulk_dofs,iface_dofs,residual; failed rows
    /// carry "nan" in the numeric columns.
    void write_csv(std::ostream& out) const;
};

struct SweepOptions {
    RunOptions run;
    /// Full-dimensional reference runs may use a different resolution.
    std::optional<RunOptions> reference_run;
    int n_quad = 16;
    /// If set, errors are measured against this function and no full runs
    /// are made.
    GammaFunction exact_reference;
    /// Progress / diagnostics sink.
    std::function<void(const std::string&)> log;
    /// Called with every successful reduced solution.
    std::function<void(double d0, const ReducedSolution&)> on_reduced;
    std::function<void(double d0, const FullSolution&)> on_full;
};

/// For each d0: one reference (full run + averaging, or the exact function),
/// then one reduced run per variant, all compared against that reference.
/// Failures are recorded per row; the table is always returned.
ErrorTable aperture_sweep(const std::function<Problem(double)>& make_problem, const std::vector<ModelVariant>& variants,
                          const std::vector<double>& d0_list, const SweepOptions& options);

/// Writes <prefix>_bulk.txt and, for reduced solutions, <prefix>_interface.txt.
void write_fields(const FullSolution& solution, const std::string& prefix);
void write_fields(const ReducedSolution& solution, const std::string& prefix, int samples_per_element = 4);

void write_bulk_field(std::ostream& out, const BulkField& field);
void write_interface_curve(std::ostream& out, const InterfaceField& field, int samples_per_element = 4);

struct BulkDump {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> elements;
    std::vector<std::string> tags;
    std::vector<int> degrees;
    std::vector<std::vector<double>> coefficients;
    /// Field value at each element vertex, evaluated with that element's polynomial.
    std::vector<std::array<double, 3>> samples;
};
BulkDump read_bulk_field(std::istream& in);
std::vector<std::pair<double, double>> read_interface_curve(std::istream& in);

}  // namespace mdfrac
