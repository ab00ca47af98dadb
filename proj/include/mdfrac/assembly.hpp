#pragma once

// SIPG assembly of the full-dimensional bulk problem and of the coupled
// bulk/interface systems of the reduced fracture models.

#include "mdfrac/dg_space.hpp"
#include "mdfrac/geometry.hpp"
#include "mdfrac/variant.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace mdfrac {

class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using ScalarField = std::function<double(const Vec2&)>;
using GammaFunction = std::function<double(double)>;

struct DofInfo {
    enum class Space { bulk, interface };
    Space space = Space::bulk;
    int element = -1;
    int local = -1;
};

struct SparseSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
    int bulk_dofs = 0;
    int interface_dofs = 0;
    std::vector<DofInfo> dof_map;

    int size() const { return static_cast<int>(rhs.size()); }
};

/// Facet penalty mu0 (k + 1)(k + dim) / h_T, maximised over the adjacent
/// elements (one entry for boundary facets, two for interior ones).
double penalty(std::span<const int> degrees, std::span<const double> h, double mu0, int dim);
inline double penalty_bulk(std::span<const int> degrees, std::span<const double> h, double mu0)
{
    return penalty(degrees, h, mu0, 2);
}

struct ScalarJumpAvg {
    Vec2 jump = Vec2::Zero();
    double average = 0.0;
};
struct VectorJumpAvg {
    double jump = 0.0;
    Vec2 average = Vec2::Zero();
};

/// Classical DG operators on an interior facet with outward normals n0, n1.
ScalarJumpAvg dg_jump_avg(double v0, double v1, const Vec2& n0, const Vec2& n1);
VectorJumpAvg dg_jump_avg(const Vec2& v0, const Vec2& v1, const Vec2& n0, const Vec2& n1);

struct DynamicJumpAvg {
    Eigen::VectorXd jump;
    Eigen::VectorXd average;
};
/// Size-checked variant: scalar traces have one component, vector traces two.
DynamicJumpAvg dg_jump_avg(std::span<const double> v0, std::span<const double> v1, const Vec2& n0,
                           const Vec2& n1, TraceKind kind);

struct FullAssemblyOptions {
    double mu0 = 10.0;
    /// Exactness degree of the element and facet rules; 0 selects 2k + 2.
    int quad_order = 0;
};

/// A_h^b(p, phi) = R_h^b(phi) on every element of the mesh. Facets between
/// bulk and fracture elements are treated as interior facets. Throws on
/// one-sided interface facets (reduced meshes).
SparseSystem assemble_full(const BulkSpace& space, const PermeabilityData& permeability, const ScalarField& q,
                           const ScalarField& g, const FullAssemblyOptions& options = {});

/// consistent: Nitsche/consistency terms derived by integrating the interface
/// flux by parts (default). printed: the alternative sign/coefficient pattern
/// kept for sensitivity studies; see README.
enum class EdgeTermForm { consistent, printed };

struct ReducedFormOptions {
    bool transport_gradients = false;
    double mu0_bulk = 10.0;
    double mu0_gamma = 10.0;
    EdgeTermForm gamma_edge_terms = EdgeTermForm::consistent;
    EdgeTermForm transport_edge_terms = EdgeTermForm::consistent;
    /// Exactness degree of the interface rule; 0 selects 2k + 8 (d is not polynomial).
    int interface_quad_order = 0;
};

struct ReducedData {
    const ApertureProfile* profile = nullptr;
    const FractureFrame* frame = nullptr;
    const PermeabilityData* permeability = nullptr;
    ScalarField q_bulk = [](const Vec2&) { return 0.0; };
    ScalarField g_bulk = [](const Vec2&) { return 0.0; };
    GammaFunction q_gamma = [](double) { return 0.0; };
    GammaFunction g_gamma = [](double) { return 0.0; };
};

/// Bulk SIPG forms plus interface transport, optional aperture-gradient
/// transport terms and the bulk/interface coupling. Bulk traces on Gamma are
/// taken on the paired mesh facets, so on curved meshes they are restrictions
/// to Gamma_1/Gamma_2 and on rectified meshes traces on Gamma itself.
SparseSystem assemble_reduced_forms(const BulkSpace& bulk, const InterfaceSpace& iface, const ReducedData& data,
                                    const ReducedFormOptions& options);

/// Variant-level entry point: checks that the mesh mode matches the variant
/// and sets the transport flag from the variant table.
SparseSystem assemble_reduced(const BulkSpace& bulk, const InterfaceSpace& iface, const ReducedData& data,
                              ModelVariant variant, ReducedFormOptions options);

/// ||A x - b||_2 / ||b||_2 (or ||A x||_2 when b = 0).
double relative_residual(const SparseSystem& system, const Eigen::VectorXd& x);

/// max |A - A^T| / max |A|
double symmetry_defect(const Eigen::SparseMatrix<double>& a);

/// One "row col value" line per stored entry, rows/cols zero based.
void write_matrix(std::ostream& out, const SparseSystem& system);

}  // namespace mdfrac
