#pragma once

// Structured simplicial meshes of the unit square around a vertical fracture,
// facet classification and the interface grid on Gamma.

#include "mdfrac/geometry.hpp"

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdfrac {

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Subdomain : int { omega1 = 0, omega2 = 1, fracture = 2 };

enum class FacetClass : int { interior = 0, exterior = 1, gamma_side1 = 2, gamma_side2 = 3 };

/// full:            Omega_1, Omega_f and Omega_2, conforming along Gamma_1 and Gamma_2
/// curved_reduced:  Omega_1 and Omega_2 bounded by Gamma_1/Gamma_2, gap left unmeshed
/// rectified:       Omega_1 and Omega_2 abutting along Gamma (vertices duplicated)
/// homogeneous:     unit square without any fracture
enum class MeshMode { full, curved_reduced, rectified, homogeneous };

const char* to_string(MeshMode mode);
const char* to_string(FacetClass cls);
const char* to_string(Subdomain tag);

struct Facet {
    std::array<int, 2> vertices{};
    /// elements[0] always valid; elements[1] == -1 for one-sided facets
    std::array<int, 2> elements{-1, -1};
    /// local edge index (opposite vertex) in each adjacent element
    std::array<int, 2> local{-1, -1};
    FacetClass cls = FacetClass::interior;
    /// unit normal pointing out of elements[0]
    Vec2 normal = Vec2::Zero();
    double length = 0.0;
};

struct FacetCounts {
    int interior = 0;
    int exterior = 0;
    int gamma_side1 = 0;
    int gamma_side2 = 0;
};

class Mesh {
public:
    MeshMode mode = MeshMode::homogeneous;
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> elements;
    std::vector<Subdomain> tags;
    std::vector<Facet> facets;

    int num_elements() const { return static_cast<int>(elements.size()); }
    int num_facets() const { return static_cast<int>(facets.size()); }

    const Vec2& vertex(int element, int local) const { return vertices[elements[element][local]]; }
    /// Signed area (positive for counter-clockwise vertex order).
    double signed_area(int element) const;
    double area(int element) const { return signed_area(element); }
    /// Maximum edge length h_T.
    double diameter(int element) const;
    Vec2 centroid(int element) const;
    /// Affine map from the reference triangle.
    Vec2 map_to_physical(int element, const Vec2& ref) const;
    Vec2 map_to_reference(int element, const Vec2& x) const;
    /// Point on facet f at parameter s in [0, 1] (from vertices[0] to vertices[1]).
    Vec2 facet_point(int facet, double s) const;

    /// Indices of facets of one class, in facet order.
    std::vector<int> facets_of(FacetClass cls) const;
};

struct MeshOptions {
    MeshMode mode = MeshMode::rectified;
    double h = 1.0 / 16.0;
    /// Overrides for the structured grid; 0 selects the value implied by h.
    int cols_side1 = 0;
    int cols_side2 = 0;
    int rows_side1 = 0;
    int rows_side2 = 0;
    /// Element layers across the fracture in full mode; 0 selects max(4, ceil(d_max / h)).
    int fracture_layers = 0;
};

/// Tensor grids split into two triangles per cell, with vertex columns
/// snapped onto the aperture graphs x1 = c - d1(x2) and x1 = c + d2(x2).
/// Gamma must be the vertical line x1 = c of the unit square.
Mesh build_bulk_mesh(const ApertureProfile& profile, const FractureFrame& frame, const MeshOptions& options);

/// n x n grid of the unit square without fracture (homogeneous mode).
Mesh build_square_mesh(int n);

/// Rebuilds the facet list from the element connectivity and classifies every
/// facet. Throws if a facet touches more than two elements.
void classify_facets(Mesh& mesh);

/// Throws MeshError listing the ids of elements with nonpositive signed area.
void check_orientation(const Mesh& mesh);
FacetCounts count_facets(const Mesh& mesh);

struct MeshQuality {
    double h_max = 0.0;
    double h_min = 0.0;
    /// Smallest interior angle in degrees.
    double min_angle = 0.0;
};
MeshQuality mesh_quality(const Mesh& mesh);

void write_mesh(std::ostream& out, const Mesh& mesh);

/// Pairing of one interface element with a bulk facet on one side. The facet
/// parameter is affine in t: s(t) = s0 + (t - t0) / (t1 - t0) * (s1 - s0).
struct SidePairing {
    int facet = -1;
    int element = -1;
    double s0 = 0.0;
    double s1 = 0.0;
};

struct InterfaceElement {
    double t0 = 0.0;
    double t1 = 0.0;
    /// side[0] on Gamma_1 (Omega_1), side[1] on Gamma_2 (Omega_2)
    std::array<SidePairing, 2> side;

    double length() const { return t1 - t0; }
};

struct InterfaceEdge {
    double t = 0.0;
    /// neighbouring interface elements; -1 outside Gamma
    int left = -1;
    int right = -1;
    bool boundary() const { return left < 0 || right < 0; }
};

struct InterfaceGrid {
    std::vector<InterfaceElement> elements;
    std::vector<InterfaceEdge> edges;

    int num_elements() const { return static_cast<int>(elements.size()); }
    /// Facet parameter of the side-i pairing at Gamma coordinate t.
    double facet_parameter(int element, int side, double t) const;
};

/// Intersects the projections of the side-1 and side-2 gamma facets onto
/// Gamma. Slivers shorter than 1e-12 |Gamma| are dropped. Throws if a part of
/// Gamma is covered by one side only.
InterfaceGrid build_interface_grid(const Mesh& mesh, const FractureFrame& frame);

}  // namespace mdfrac
