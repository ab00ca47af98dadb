#include "mdfrac/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace mdfrac {

const char* to_string(MeshMode mode)
{
    switch (mode) {
    case MeshMode::full: return "full";
    case MeshMode::curved_reduced: return "curved";
    case MeshMode::rectified: return "rectified";
    case MeshMode::homogeneous: return "homogeneous";
    }
    return "?";
}

const char* to_string(FacetClass cls)
{
    switch (cls) {
    case FacetClass::interior: return "interior";
    case FacetClass::exterior: return "exterior";
    case FacetClass::gamma_side1: return "gamma1";
    case FacetClass::gamma_side2: return "gamma2";
    }
    return "?";
}

const char* to_string(Subdomain tag)
{
    switch (tag) {
    case Subdomain::omega1: return "omega1";
    case Subdomain::omega2: return "omega2";
    case Subdomain::fracture: return "fracture";
    }
    return "?";
}

double Mesh::signed_area(int e) const
{
    const Vec2& a = vertex(e, 0);
    const Vec2& b = vertex(e, 1);
    const Vec2& c = vertex(e, 2);
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

double Mesh::diameter(int e) const
{
    const Vec2& a = vertex(e, 0);
    const Vec2& b = vertex(e, 1);
    const Vec2& c = vertex(e, 2);
    return std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
}

Vec2 Mesh::centroid(int e) const
{
    return (vertex(e, 0) + vertex(e, 1) + vertex(e, 2)) / 3.0;
}

Vec2 Mesh::map_to_physical(int e, const Vec2& ref) const
{
    const Vec2& a = vertex(e, 0);
    return a + ref.x() * (vertex(e, 1) - a) + ref.y() * (vertex(e, 2) - a);
}

Vec2 Mesh::map_to_reference(int e, const Vec2& x) const
{
    const Vec2& a = vertex(e, 0);
    Mat2 jac;
    jac.col(0) = vertex(e, 1) - a;
    jac.col(1) = vertex(e, 2) - a;
    return jac.inverse() * (x - a);
}

Vec2 Mesh::facet_point(int f, double s) const
{
    const Vec2& a = vertices[facets[f].vertices[0]];
    const Vec2& b = vertices[facets[f].vertices[1]];
    return a + s * (b - a);
}

std::vector<int> Mesh::facets_of(FacetClass cls) const
{
    std::vector<int> out;
    for (int f = 0; f < num_facets(); ++f) {
        if (facets[f].cls == cls) {
            out.push_back(f);
        }
    }
    return out;
}

namespace {

constexpr double kBoundaryTol = 1e-12;

// Vertex ids of a (rows + 1) x (cols + 1) block, row-major from bottom left.
struct Block {
    int cols = 0;
    int rows = 0;
    std::vector<int> ids;
    int id(int row, int col) const { return ids[static_cast<std::size_t>(row) * (cols + 1) + col]; }
};

std::vector<double> uniform_rows(int rows)
{
    std::vector<double> y(rows + 1);
    for (int r = 0; r <= rows; ++r) {
        y[r] = static_cast<double>(r) / rows;
    }
    return y;
}

// Columns interpolate linearly between x_left(y) and x_right(y). Column 0 may
// reuse an existing column of vertex ids.
Block add_block_vertices(Mesh& mesh, int cols, const std::vector<double>& y,
                         const std::function<double(double)>& x_left, const std::function<double(double)>& x_right,
                         const std::vector<int>* left_ids, const std::vector<int>* right_ids)
{
    Block block;
    block.cols = cols;
    block.rows = static_cast<int>(y.size()) - 1;
    block.ids.resize(static_cast<std::size_t>(block.rows + 1) * (cols + 1));
    for (int r = 0; r <= block.rows; ++r) {
        const double xl = x_left(y[r]);
        const double xr = x_right(y[r]);
        for (int c = 0; c <= cols; ++c) {
            int id;
            if (c == 0 && left_ids) {
                id = (*left_ids)[r];
            } else if (c == cols && right_ids) {
                id = (*right_ids)[r];
            } else {
                double x = xl + (xr - xl) * static_cast<double>(c) / cols;
                if (c == cols) {
                    x = xr;
                }
                id = static_cast<int>(mesh.vertices.size());
                mesh.vertices.emplace_back(x, y[r]);
            }
            block.ids[static_cast<std::size_t>(r) * (cols + 1) + c] = id;
        }
    }
    return block;
}

std::vector<int> column_ids(const Block& block, int col)
{
    std::vector<int> ids(block.rows + 1);
    for (int r = 0; r <= block.rows; ++r) {
        ids[r] = block.id(r, col);
    }
    return ids;
}

void add_block_elements(Mesh& mesh, const Block& block, Subdomain tag)
{
    for (int r = 0; r < block.rows; ++r) {
        for (int c = 0; c < block.cols; ++c) {
            const int v00 = block.id(r, c);
            const int v10 = block.id(r, c + 1);
            const int v11 = block.id(r + 1, c + 1);
            const int v01 = block.id(r + 1, c);
            mesh.elements.push_back({v00, v10, v11});
            mesh.tags.push_back(tag);
            mesh.elements.push_back({v00, v11, v01});
            mesh.tags.push_back(tag);
        }
    }
}

bool on_unit_square_boundary(const Vec2& a, const Vec2& b)
{
    auto same_side = [](double u, double v, double s) {
        return std::abs(u - s) < kBoundaryTol && std::abs(v - s) < kBoundaryTol;
    };
    return same_side(a.x(), b.x(), 0.0) || same_side(a.x(), b.x(), 1.0) || same_side(a.y(), b.y(), 0.0) ||
           same_side(a.y(), b.y(), 1.0);
}

int count_or(int override_value, double extent, double h)
{
    if (override_value > 0) {
        return override_value;
    }
    return std::max(1, static_cast<int>(std::ceil(extent / h - 1e-9)));
}

}  // namespace

void check_orientation(const Mesh& mesh)
{
    std::vector<int> bad;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        if (!(mesh.signed_area(e) > 0.0)) {
            bad.push_back(e);
        }
    }
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << bad.size() << " inverted or degenerate element(s):";
        for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 20); ++i) {
            msg << ' ' << bad[i];
        }
        if (bad.size() > 20) {
            msg << " ...";
        }
        throw MeshError(msg.str());
    }
}

Mesh build_square_mesh(int n)
{
    if (n < 1) {
        throw MeshError("square mesh: need at least one cell per direction");
    }
    Mesh mesh;
    mesh.mode = MeshMode::homogeneous;
    const auto y = uniform_rows(n);
    const Block block = add_block_vertices(
        mesh, n, y, [](double) { return 0.0; }, [](double) { return 1.0; }, nullptr, nullptr);
    add_block_elements(mesh, block, Subdomain::omega1);
    check_orientation(mesh);
    classify_facets(mesh);
    return mesh;
}

Mesh build_bulk_mesh(const ApertureProfile& profile, const FractureFrame& frame, const MeshOptions& opt)
{
    if (!(opt.h > 0.0)) {
        throw MeshError("bulk mesh: h must be positive");
    }
    if (std::abs(frame.normal().x() - 1.0) > 1e-12 || std::abs(frame.t_min()) > 1e-12 ||
        std::abs(frame.t_max() - 1.0) > 1e-12) {
        throw MeshError("bulk mesh: Gamma must be the vertical line x1 = c of the unit square");
    }
    const double c = frame.offset();
    if (!(c > 0.0 && c < 1.0)) {
        throw MeshError("bulk mesh: Gamma must lie inside the unit square");
    }
    if (opt.mode == MeshMode::homogeneous) {
        return build_square_mesh(count_or(opt.cols_side1, 1.0, opt.h));
    }

    const int cols1 = count_or(opt.cols_side1, c, opt.h);
    const int cols2 = count_or(opt.cols_side2, 1.0 - c, opt.h);
    const int rows1 = count_or(opt.rows_side1, 1.0, opt.h);
    const int rows2 = count_or(opt.rows_side2, 1.0, opt.h);
    if (opt.mode == MeshMode::full && rows1 != rows2) {
        throw MeshError("bulk mesh: full mode needs the same row count on both sides");
    }
    const auto y1 = uniform_rows(rows1);
    const auto y2 = uniform_rows(rows2);

    const bool curved = opt.mode != MeshMode::rectified;
    std::function<double(double)> gamma1 = [c](double) { return c; };
    std::function<double(double)> gamma2 = [c](double) { return c; };
    double d_max = 0.0;
    if (curved) {
        gamma1 = [&profile, c](double y) { return c - profile.d1(y); };
        gamma2 = [&profile, c](double y) { return c + profile.d2(y); };
        for (const auto* ys : {&y1, &y2}) {
            for (double y : *ys) {
                const ApertureSample s = eval_aperture_at(profile, frame, y);
                d_max = std::max(d_max, s.d);
                if (!(c - s.d1 > 0.0) || !(c + s.d2 < 1.0)) {
                    std::ostringstream msg;
                    msg << "bulk mesh: aperture too large, " << (c - s.d1 > 0.0 ? "Gamma_2" : "Gamma_1")
                        << " exits the domain at x2 = " << y;
                    throw MeshError(msg.str());
                }
            }
        }
    }

    Mesh mesh;
    mesh.mode = opt.mode;
    const Block b1 = add_block_vertices(
        mesh, cols1, y1, [](double) { return 0.0; }, gamma1, nullptr, nullptr);
    const Block b2 = add_block_vertices(
        mesh, cols2, y2, gamma2, [](double) { return 1.0; }, nullptr, nullptr);
    add_block_elements(mesh, b1, Subdomain::omega1);
    add_block_elements(mesh, b2, Subdomain::omega2);
    if (opt.mode == MeshMode::full) {
        const int layers = opt.fracture_layers > 0
                               ? opt.fracture_layers
                               : std::max(4, static_cast<int>(std::ceil(d_max / opt.h - 1e-9)));
        const auto left = column_ids(b1, cols1);
        const auto right = column_ids(b2, 0);
        const Block bf = add_block_vertices(mesh, layers, y1, gamma1, gamma2, &left, &right);
        add_block_elements(mesh, bf, Subdomain::fracture);
    }
    check_orientation(mesh);
    classify_facets(mesh);
    return mesh;
}

void classify_facets(Mesh& mesh)
{
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edges;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        for (int j = 0; j < 3; ++j) {
            const int a = mesh.elements[e][(j + 1) % 3];
            const int b = mesh.elements[e][(j + 2) % 3];
            edges[{std::min(a, b), std::max(a, b)}].emplace_back(e, j);
        }
    }
    mesh.facets.clear();
    mesh.facets.reserve(edges.size());
    for (const auto& [key, adj] : edges) {
        if (adj.size() > 2) {
            std::ostringstream msg;
            msg << "facet (" << key.first << ", " << key.second << ") is shared by " << adj.size() << " elements";
            throw MeshError(msg.str());
        }
        Facet f;
        auto ordered = adj;
        // Put the bulk element first on fracture/bulk facets.
        if (ordered.size() == 2 && mesh.tags[ordered[0].first] == Subdomain::fracture) {
            std::swap(ordered[0], ordered[1]);
        }
        const int e0 = ordered[0].first;
        const int j0 = ordered[0].second;
        f.vertices = {mesh.elements[e0][(j0 + 1) % 3], mesh.elements[e0][(j0 + 2) % 3]};
        f.elements[0] = e0;
        f.local[0] = j0;
        if (ordered.size() == 2) {
            f.elements[1] = ordered[1].first;
            f.local[1] = ordered[1].second;
        }
        const Vec2& a = mesh.vertices[f.vertices[0]];
        const Vec2& b = mesh.vertices[f.vertices[1]];
        const Vec2 edge = b - a;
        f.length = edge.norm();
        f.normal = Vec2(edge.y(), -edge.x()) / f.length;
        if (f.normal.dot(0.5 * (a + b) - mesh.centroid(e0)) < 0.0) {
            f.normal = -f.normal;
        }

        const Subdomain t0 = mesh.tags[e0];
        if (ordered.size() == 2) {
            const Subdomain t1 = mesh.tags[f.elements[1]];
            if (t0 == t1) {
                f.cls = FacetClass::interior;
            } else if (t1 == Subdomain::fracture) {
                f.cls = t0 == Subdomain::omega1 ? FacetClass::gamma_side1 : FacetClass::gamma_side2;
            } else {
                f.cls = FacetClass::interior;
            }
        } else if (on_unit_square_boundary(a, b)) {
            f.cls = FacetClass::exterior;
        } else if (t0 == Subdomain::omega1) {
            f.cls = FacetClass::gamma_side1;
        } else if (t0 == Subdomain::omega2) {
            f.cls = FacetClass::gamma_side2;
        } else {
            throw MeshError("fracture element facet is neither shared nor on the outer boundary");
        }
        mesh.facets.push_back(f);
    }
}

FacetCounts count_facets(const Mesh& mesh)
{
    FacetCounts counts;
    for (const Facet& f : mesh.facets) {
        switch (f.cls) {
        case FacetClass::interior: ++counts.interior; break;
        case FacetClass::exterior: ++counts.exterior; break;
        case FacetClass::gamma_side1: ++counts.gamma_side1; break;
        case FacetClass::gamma_side2: ++counts.gamma_side2; break;
        }
    }
    return counts;
}

MeshQuality mesh_quality(const Mesh& mesh)
{
    if (mesh.elements.empty()) {
        throw MeshError("mesh quality: empty mesh");
    }
    MeshQuality q;
    q.h_min = std::numeric_limits<double>::infinity();
    q.min_angle = 180.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const double h = mesh.diameter(e);
        q.h_max = std::max(q.h_max, h);
        q.h_min = std::min(q.h_min, h);
        for (int j = 0; j < 3; ++j) {
            const Vec2 u = mesh.vertex(e, (j + 1) % 3) - mesh.vertex(e, j);
            const Vec2 v = mesh.vertex(e, (j + 2) % 3) - mesh.vertex(e, j);
            const double cosang = std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0);
            q.min_angle = std::min(q.min_angle, std::acos(cosang) * 180.0 / std::numbers::pi);
        }
    }
    return q;
}

void write_mesh(std::ostream& out, const Mesh& mesh)
{
    out << std::setprecision(17);
    out << "mode " << to_string(mesh.mode) << '\n';
    out << "vertices " << mesh.vertices.size() << '\n';
    for (const Vec2& v : mesh.vertices) {
        out << v.x() << ' ' << v.y() << '\n';
    }
    out << "elements " << mesh.elements.size() << '\n';
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& el = mesh.elements[e];
        out << el[0] << ' ' << el[1] << ' ' << el[2] << ' ' << to_string(mesh.tags[e]) << '\n';
    }
    out << "facets " << mesh.facets.size() << '\n';
    for (const Facet& f : mesh.facets) {
        out << f.vertices[0] << ' ' << f.vertices[1] << ' ' << f.elements[0] << ' ' << f.elements[1] << ' '
            << to_string(f.cls) << '\n';
    }
}

double InterfaceGrid::facet_parameter(int element, int side, double t) const
{
    const InterfaceElement& el = elements[element];
    const SidePairing& p = el.side[side];
    return p.s0 + (t - el.t0) / (el.t1 - el.t0) * (p.s1 - p.s0);
}

namespace {

struct ProjectedFacet {
    double lo = 0.0;
    double hi = 0.0;
    int facet = -1;
};

std::vector<ProjectedFacet> project_side(const Mesh& mesh, const FractureFrame& frame, FacetClass cls, int side)
{
    std::vector<ProjectedFacet> out;
    for (int f = 0; f < mesh.num_facets(); ++f) {
        if (mesh.facets[f].cls != cls) {
            continue;
        }
        const double ta = frame.t(mesh.vertices[mesh.facets[f].vertices[0]]);
        const double tb = frame.t(mesh.vertices[mesh.facets[f].vertices[1]]);
        out.push_back({std::min(ta, tb), std::max(ta, tb), f});
    }
    if (out.empty()) {
        throw MeshError("interface grid: no gamma facets on side " + std::to_string(side));
    }
    std::sort(out.begin(), out.end(), [](const ProjectedFacet& a, const ProjectedFacet& b) { return a.lo < b.lo; });
    const double tol = 1e-12 * frame.length();
    bool tiles = std::abs(out.front().lo - frame.t_min()) < tol && std::abs(out.back().hi - frame.t_max()) < tol;
    for (std::size_t i = 1; i < out.size() && tiles; ++i) {
        tiles = std::abs(out[i].lo - out[i - 1].hi) < tol;
    }
    if (!tiles) {
        throw MeshError("interface grid: projected facets of side " + std::to_string(side) +
                        " do not tile Gamma (meshes disagree about Gamma's extent)");
    }
    return out;
}

const ProjectedFacet& covering(const std::vector<ProjectedFacet>& facets, double t)
{
    auto it = std::upper_bound(facets.begin(), facets.end(), t,
                               [](double v, const ProjectedFacet& f) { return v < f.lo; });
    if (it == facets.begin()) {
        throw MeshError("interface grid: projection gap");
    }
    return *std::prev(it);
}

}  // namespace

InterfaceGrid build_interface_grid(const Mesh& mesh, const FractureFrame& frame)
{
    if (mesh.mode != MeshMode::curved_reduced && mesh.mode != MeshMode::rectified) {
        throw MeshError(std::string("interface grid: mesh mode '") + to_string(mesh.mode) +
                        "' has no reduced interface");
    }
    const auto side1 = project_side(mesh, frame, FacetClass::gamma_side1, 1);
    const auto side2 = project_side(mesh, frame, FacetClass::gamma_side2, 2);
    const double tol = 1e-12 * frame.length();

    std::vector<double> breaks;
    for (const auto* side : {&side1, &side2}) {
        for (const ProjectedFacet& f : *side) {
            breaks.push_back(f.lo);
        }
    }
    breaks.push_back(frame.t_max());
    std::sort(breaks.begin(), breaks.end());
    std::vector<double> merged;
    for (double b : breaks) {
        if (merged.empty() || b - merged.back() > tol) {
            merged.push_back(b);
        }
    }

    InterfaceGrid grid;
    for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
        const double t0 = merged[i];
        const double t1 = merged[i + 1];
        const double mid = 0.5 * (t0 + t1);
        InterfaceElement el;
        el.t0 = t0;
        el.t1 = t1;
        int s = 0;
        for (const auto* side : {&side1, &side2}) {
            const ProjectedFacet& pf = covering(*side, mid);
            const Facet& f = mesh.facets[pf.facet];
            const double ta = frame.t(mesh.vertices[f.vertices[0]]);
            const double tb = frame.t(mesh.vertices[f.vertices[1]]);
            SidePairing p;
            p.facet = pf.facet;
            p.element = f.elements[0];
            p.s0 = (t0 - ta) / (tb - ta);
            p.s1 = (t1 - ta) / (tb - ta);
            el.side[s++] = p;
        }
        grid.elements.push_back(el);
    }
    const int n = grid.num_elements();
    for (int i = 0; i <= n; ++i) {
        InterfaceEdge edge;
        edge.t = i < n ? grid.elements[i].t0 : grid.elements[n - 1].t1;
        edge.left = i - 1;
        edge.right = i < n ? i : -1;
        grid.edges.push_back(edge);
    }
    return grid;
}

}  // namespace mdfrac
