#include "mdfrac/assembly.hpp"

#include "mdfrac/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace mdfrac {

double penalty(std::span<const int> degrees, std::span<const double> h, double mu0, int dim)
{
    if (degrees.empty() || degrees.size() != h.size() || degrees.size() > 2) {
        throw AssemblyError("penalty: need one or two (degree, h) pairs");
    }
    if (!(mu0 > 0.0)) {
        throw AssemblyError("penalty: mu0 must be positive");
    }
    double mu = 0.0;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        if (!(h[i] > 0.0)) {
            throw AssemblyError("penalty: element size h_T must be positive");
        }
        const double k = degrees[i];
        mu = std::max(mu, (k + 1.0) * (k + dim) / h[i]);
    }
    return mu0 * mu;
}

ScalarJumpAvg dg_jump_avg(double v0, double v1, const Vec2& n0, const Vec2& n1)
{
    return {v0 * n0 + v1 * n1, 0.5 * (v0 + v1)};
}

VectorJumpAvg dg_jump_avg(const Vec2& v0, const Vec2& v1, const Vec2& n0, const Vec2& n1)
{
    return {v0.dot(n0) + v1.dot(n1), 0.5 * (v0 + v1)};
}

DynamicJumpAvg dg_jump_avg(std::span<const double> v0, std::span<const double> v1, const Vec2& n0,
                           const Vec2& n1, TraceKind kind)
{
    const std::size_t expected = kind == TraceKind::scalar ? 1 : 2;
    if (v0.size() != expected || v1.size() != expected) {
        std::ostringstream msg;
        msg << "dg jump/average: expected " << expected << " component(s) per trace, got " << v0.size() << " and "
            << v1.size();
        throw AssemblyError(msg.str());
    }
    DynamicJumpAvg out;
    if (kind == TraceKind::scalar) {
        const ScalarJumpAvg ja = dg_jump_avg(v0[0], v1[0], n0, n1);
        out.jump = ja.jump;
        out.average = Eigen::VectorXd::Constant(1, ja.average);
    } else {
        const VectorJumpAvg ja = dg_jump_avg(Vec2(v0[0], v0[1]), Vec2(v1[0], v1[1]), n0, n1);
        out.jump = Eigen::VectorXd::Constant(1, ja.jump);
        out.average = ja.average;
    }
    return out;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void scatter(Triplets& trip, const std::vector<int>& rows, const std::vector<int>& cols, const Eigen::MatrixXd& local)
{
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const double v = local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (v != 0.0) {
                trip.emplace_back(rows[i], cols[j], v);
            }
        }
    }
}

std::vector<int> dof_range(int offset, int n)
{
    std::vector<int> out(n);
    for (int i = 0; i < n; ++i) {
        out[i] = offset + i;
    }
    return out;
}

const std::function<Mat2(const Vec2&)>& permeability_of(const PermeabilityData& perm, Subdomain tag)
{
    switch (tag) {
    case Subdomain::omega1: return perm.k1;
    case Subdomain::omega2: return perm.k2;
    case Subdomain::fracture: return perm.k_fracture;
    }
    return perm.k1;
}

void check_permeability(const Mesh& mesh, const PermeabilityData& perm)
{
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& k = permeability_of(perm, mesh.tags[e]);
        if (!k) {
            throw AssemblyError(std::string("missing permeability for subdomain ") + to_string(mesh.tags[e]));
        }
    }
}

// Volume, interior-facet and outer-boundary terms of the bulk SIPG form.
// One-sided interface facets are skipped when `allow_interface_facets` is set.
void assemble_bulk(const BulkSpace& space, const PermeabilityData& perm, const ScalarField& q, const ScalarField& g,
                   double mu0, int quad_order, bool allow_interface_facets, Triplets& trip, Eigen::VectorXd& rhs)
{
    const Mesh& mesh = space.mesh();
    check_permeability(mesh, perm);

    for (int e = 0; e < mesh.num_elements(); ++e) {
        const int k = space.degree(e);
        const int order = quad_order > 0 ? quad_order : 2 * k + 2;
        const TriangleRule rule = triangle_rule(order);
        const int n = space.local_dofs(e);
        const auto& kfun = permeability_of(perm, mesh.tags[e]);
        check_spd(kfun(mesh.centroid(e)), to_string(mesh.tags[e]));
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd load = Eigen::VectorXd::Zero(n);
        const double jac = 2.0 * mesh.area(e);
        for (std::size_t qp = 0; qp < rule.points.size(); ++qp) {
            const Vec2 x = mesh.map_to_physical(e, rule.points[qp]);
            const BasisEval b = space.eval_reference(e, rule.points[qp]);
            const double w = rule.weights[qp] * jac;
            const Mat2 kx = kfun(x);
            local += w * b.grads * kx * b.grads.transpose();
            load += w * q(x) * b.values;
        }
        const auto dofs = dof_range(space.offset(e), n);
        scatter(trip, dofs, dofs, local);
        rhs.segment(space.offset(e), n) += load;
    }

    for (int f = 0; f < mesh.num_facets(); ++f) {
        const Facet& facet = mesh.facets[f];
        const bool two_sided = facet.elements[1] >= 0;
        if (!two_sided && facet.cls != FacetClass::exterior) {
            if (allow_interface_facets) {
                continue;
            }
            throw AssemblyError("full assembly: one-sided interface facet " + std::to_string(f) +
                                " (mesh was built for a reduced model)");
        }
        const Vec2& nrm = facet.normal;
        if (two_sided) {
            const int e0 = facet.elements[0];
            const int e1 = facet.elements[1];
            const int kk[2] = {space.degree(e0), space.degree(e1)};
            const double hh[2] = {mesh.diameter(e0), mesh.diameter(e1)};
            const double mu = penalty(kk, hh, mu0, 2);
            const int order = quad_order > 0 ? quad_order : 2 * std::max(kk[0], kk[1]) + 2;
            const LineRule rule = line_rule(order);
            const int n0 = space.local_dofs(e0);
            const int n1 = space.local_dofs(e1);
            const auto& k0f = permeability_of(perm, mesh.tags[e0]);
            const auto& k1f = permeability_of(perm, mesh.tags[e1]);
            Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n0 + n1, n0 + n1);
            Eigen::VectorXd jump(n0 + n1), flux(n0 + n1);
            for (std::size_t qp = 0; qp < rule.points.size(); ++qp) {
                const Vec2 x = mesh.facet_point(f, rule.points[qp]);
                const double w = rule.weights[qp] * facet.length;
                const BasisEval b0 = space.eval(e0, x);
                const BasisEval b1 = space.eval(e1, x);
                jump << b0.values, -b1.values;
                flux << 0.5 * (b0.grads * (k0f(x) * nrm)), 0.5 * (b1.grads * (k1f(x) * nrm));
                local += w * (mu * jump * jump.transpose() - jump * flux.transpose() - flux * jump.transpose());
            }
            std::vector<int> dofs = dof_range(space.offset(e0), n0);
            const auto d1 = dof_range(space.offset(e1), n1);
            dofs.insert(dofs.end(), d1.begin(), d1.end());
            scatter(trip, dofs, dofs, local);
        } else {
            const int e0 = facet.elements[0];
            const int kk[1] = {space.degree(e0)};
            const double hh[1] = {mesh.diameter(e0)};
            const double mu = penalty(kk, hh, mu0, 2);
            const int order = quad_order > 0 ? quad_order : 2 * kk[0] + 2;
            const LineRule rule = line_rule(order);
            const int n0 = space.local_dofs(e0);
            const auto& k0f = permeability_of(perm, mesh.tags[e0]);
            Eigen::MatrixXd local = Eigen::MatrixXd::Zero(n0, n0);
            Eigen::VectorXd load = Eigen::VectorXd::Zero(n0);
            for (std::size_t qp = 0; qp < rule.points.size(); ++qp) {
                const Vec2 x = mesh.facet_point(f, rule.points[qp]);
                const double w = rule.weights[qp] * facet.length;
                const BasisEval b = space.eval(e0, x);
                const Eigen::VectorXd flux = b.grads * (k0f(x) * nrm);
                local += w * (mu * b.values * b.values.transpose() - b.values * flux.transpose() -
                              flux * b.values.transpose());
                const double gx = g(x);
                load += w * (mu * gx * b.values - gx * flux);
            }
            const auto dofs = dof_range(space.offset(e0), n0);
            scatter(trip, dofs, dofs, local);
            rhs.segment(space.offset(e0), n0) += load;
        }
    }
}

std::vector<DofInfo> bulk_dof_map(const BulkSpace& space)
{
    std::vector<DofInfo> map;
    map.reserve(space.num_dofs());
    for (int e = 0; e < space.mesh().num_elements(); ++e) {
        for (int i = 0; i < space.local_dofs(e); ++i) {
            map.push_back({DofInfo::Space::bulk, e, i});
        }
    }
    return map;
}

// Bulk basis values at the side-i trace point of interface element `el` at t.
struct TraceEval {
    int element = -1;
    Eigen::VectorXd values;
};

TraceEval bulk_trace(const BulkSpace& bulk, const InterfaceGrid& grid, int el, int side, double t)
{
    const SidePairing& p = grid.elements[el].side[side];
    if (p.facet < 0 || p.element < 0) {
        throw AssemblyError("reduced assembly: interface element " + std::to_string(el) + " has no side-" +
                            std::to_string(side + 1) + " pairing");
    }
    const Vec2 x = bulk.mesh().facet_point(p.facet, grid.facet_parameter(el, side, t));
    return {p.element, bulk.values(p.element, x)};
}

}  // namespace

SparseSystem assemble_full(const BulkSpace& space, const PermeabilityData& permeability, const ScalarField& q,
                           const ScalarField& g, const FullAssemblyOptions& options)
{
    if (options.quad_order > 0 && options.quad_order < 2 * space.max_degree()) {
        throw AssemblyError("full assembly: quadrature order " + std::to_string(options.quad_order) +
                            " cannot integrate the stiffness terms exactly (need >= 2k)");
    }
    const int n = space.num_dofs();
    Triplets trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    assemble_bulk(space, permeability, q, g, options.mu0, options.quad_order, false, trip, rhs);
    SparseSystem sys;
    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    sys.rhs = std::move(rhs);
    sys.bulk_dofs = n;
    sys.dof_map = bulk_dof_map(space);
    return sys;
}

SparseSystem assemble_reduced_forms(const BulkSpace& bulk, const InterfaceSpace& iface, const ReducedData& data,
                                    const ReducedFormOptions& opt)
{
    if (!data.profile || !data.frame || !data.permeability) {
        throw AssemblyError("reduced assembly: aperture profile, frame and permeability are required");
    }
    const Mesh& mesh = bulk.mesh();
    if (mesh.mode != MeshMode::curved_reduced && mesh.mode != MeshMode::rectified) {
        throw AssemblyError(std::string("reduced assembly: mesh mode '") + to_string(mesh.mode) +
                            "' is not a reduced-model mesh");
    }
    if (iface.global_offset() != bulk.num_dofs()) {
        throw AssemblyError("reduced assembly: interface dofs must follow the bulk dofs");
    }
    if (!(opt.mu0_gamma > 0.0)) {
        throw AssemblyError("reduced assembly: mu0_gamma must be positive");
    }
    const PermeabilityData& perm = *data.permeability;
    perm.validate();
    const ApertureProfile& profile = *data.profile;
    const FractureFrame& frame = *data.frame;
    const InterfaceGrid& grid = iface.grid();

    const int nb = bulk.num_dofs();
    const int ni = iface.num_dofs();
    const int n = nb + ni;
    Triplets trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    assemble_bulk(bulk, perm, data.q_bulk, data.g_bulk, opt.mu0_bulk, 0, true, trip, rhs);

    const int kf = iface.degree();
    const int nf = iface.local_dofs();
    const int order = opt.interface_quad_order > 0 ? opt.interface_quad_order
                                                   : 2 * std::max(kf, bulk.max_degree()) + 8;
    const LineRule rule = line_rule(order);
    Eigen::VectorXd psi, dpsi;

    // Interface elements: transport volume term, coupling, sources.
    for (int el = 0; el < grid.num_elements(); ++el) {
        const InterfaceElement& ie = grid.elements[el];
        const int e1 = ie.side[0].element;
        const int e2 = ie.side[1].element;
        if (e1 < 0 || e2 < 0) {
            throw AssemblyError("reduced assembly: interface element " + std::to_string(el) + " is not paired");
        }
        const int n1 = bulk.local_dofs(e1);
        const int n2 = bulk.local_dofs(e2);
        const int m = n1 + n2 + nf;
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd load = Eigen::VectorXd::Zero(nf);
        Eigen::VectorXd jump(m), avg(m);
        for (std::size_t qp = 0; qp < rule.points.size(); ++qp) {
            const double t = ie.t0 + rule.points[qp] * ie.length();
            const double w = rule.weights[qp] * ie.length();
            const ApertureSample ap = eval_aperture_at(profile, frame, t);
            const double dd = profile.dd(t);
            const double kg = perm.k_gamma(t);
            const double kp = perm.k_perp(t);
            const double beta = perm.beta(t, ap.d);
            const TraceEval tr1 = bulk_trace(bulk, grid, el, 0, t);
            const TraceEval tr2 = bulk_trace(bulk, grid, el, 1, t);
            iface.eval(el, t, psi, dpsi);

            jump << -tr1.values, tr2.values, Eigen::VectorXd::Zero(nf);
            avg << -0.5 * tr1.values, -0.5 * tr2.values, psi;
            local += w * (kp / ap.d * jump * jump.transpose() + beta * avg * avg.transpose());

            // K_Gamma (d p)' phi'
            local.bottomRightCorner(nf, nf) += w * kg * dpsi * (dd * psi + ap.d * dpsi).transpose();
            if (opt.transport_gradients) {
                // -(p1 d1' + p2 d2') K_Gamma phi'
                local.block(n1 + n2, 0, nf, n1) -= w * kg * profile.dd1(t) * dpsi * tr1.values.transpose();
                local.block(n1 + n2, n1, nf, n2) -= w * kg * profile.dd2(t) * dpsi * tr2.values.transpose();
            }
            load += w * data.q_gamma(t) * psi;
        }
        std::vector<int> dofs = dof_range(bulk.offset(e1), n1);
        const auto d2 = dof_range(bulk.offset(e2), n2);
        const auto df = dof_range(iface.offset(el), nf);
        dofs.insert(dofs.end(), d2.begin(), d2.end());
        dofs.insert(dofs.end(), df.begin(), df.end());
        scatter(trip, dofs, dofs, local);
        rhs.segment(iface.offset(el), nf) += load;
    }

    // Interface edges: DG terms of the transport operator.
    for (const InterfaceEdge& edge : grid.edges) {
        const double t = edge.t;
        const ApertureSample ap = eval_aperture_at(profile, frame, t);
        const double d = ap.d;
        const double dd = profile.dd(t);
        const double kg = perm.k_gamma(t);
        const double grad_i[2] = {profile.dd1(t), profile.dd2(t)};

        if (!edge.boundary()) {
            const int L = edge.left;
            const int R = edge.right;
            const int kk[2] = {kf, kf};
            const double hh[2] = {grid.elements[L].length(), grid.elements[R].length()};
            const double mu = penalty(kk, hh, opt.mu0_gamma, 1);
            Eigen::VectorXd psiL, dpsiL, psiR, dpsiR;
            iface.eval(L, t, psiL, dpsiL);
            iface.eval(R, t, psiR, dpsiR);
            Eigen::VectorXd jump(2 * nf), fp(2 * nf), fphi(2 * nf);
            jump << psiL, -psiR;
            fp << 0.5 * kg * (dd * psiL + d * dpsiL), 0.5 * kg * (dd * psiR + d * dpsiR);
            fphi << 0.5 * kg * dpsiL, 0.5 * kg * dpsiR;
            const Eigen::MatrixXd local =
                mu * jump * jump.transpose() - jump * fp.transpose() - d * fphi * jump.transpose();
            std::vector<int> dofs = dof_range(iface.offset(L), nf);
            const auto dr = dof_range(iface.offset(R), nf);
            dofs.insert(dofs.end(), dr.begin(), dr.end());
            scatter(trip, dofs, dofs, local);

            if (opt.transport_gradients) {
                // + [phi] {K (p1 d1' + p2 d2')}, the average taken over both
                // interface elements at the edge
                for (int x : {L, R}) {
                    for (int side = 0; side < 2; ++side) {
                        const TraceEval tr = bulk_trace(bulk, grid, x, side, t);
                        const double coef = opt.transport_edge_terms == EdgeTermForm::consistent
                                                ? 0.5 * kg * grad_i[side]
                                                : 0.25 * kg * (grad_i[0] + grad_i[1]);
                        const Eigen::MatrixXd block = coef * jump * tr.values.transpose();
                        scatter(trip, dofs, dof_range(bulk.offset(tr.element), bulk.local_dofs(tr.element)), block);
                    }
                }
            }
        } else {
            const int X = edge.left >= 0 ? edge.left : edge.right;
            const double nE = edge.left >= 0 ? 1.0 : -1.0;
            const int kk[1] = {kf};
            const double hh[1] = {grid.elements[X].length()};
            const double mu = penalty(kk, hh, opt.mu0_gamma, 1);
            iface.eval(X, t, psi, dpsi);
            const double sym = opt.gamma_edge_terms == EdgeTermForm::consistent ? 1.0 : -1.0;
            const Eigen::MatrixXd local = mu * psi * psi.transpose() -
                                          nE * kg * psi * (dd * psi + d * dpsi).transpose() -
                                          sym * nE * kg * d * dpsi * psi.transpose();
            const auto dofs = dof_range(iface.offset(X), nf);
            scatter(trip, dofs, dofs, local);
            const double gg = data.g_gamma(t);
            rhs.segment(iface.offset(X), nf) += mu * gg * psi - nE * d * gg * kg * dpsi;

            if (opt.transport_gradients) {
                const double kfac = opt.transport_edge_terms == EdgeTermForm::consistent ? kg : 1.0;
                for (int side = 0; side < 2; ++side) {
                    const TraceEval tr = bulk_trace(bulk, grid, X, side, t);
                    const Eigen::MatrixXd block = nE * kfac * grad_i[side] * psi * tr.values.transpose();
                    scatter(trip, dofs, dof_range(bulk.offset(tr.element), bulk.local_dofs(tr.element)), block);
                }
            }
        }
    }

    SparseSystem sys;
    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    sys.rhs = std::move(rhs);
    sys.bulk_dofs = nb;
    sys.interface_dofs = ni;
    sys.dof_map = bulk_dof_map(bulk);
    for (int el = 0; el < grid.num_elements(); ++el) {
        for (int i = 0; i < nf; ++i) {
            sys.dof_map.push_back({DofInfo::Space::interface, el, i});
        }
    }
    return sys;
}

SparseSystem assemble_reduced(const BulkSpace& bulk, const InterfaceSpace& iface, const ReducedData& data,
                              ModelVariant variant, ReducedFormOptions options)
{
    if (variant == ModelVariant::full) {
        throw AssemblyError("reduced assembly: the full-dimensional model has no interface system");
    }
    const MeshMode expected = mesh_mode_of(variant);
    if (bulk.mesh().mode != expected) {
        throw AssemblyError(std::string("variant ") + to_string(variant) + " requires a " + to_string(expected) +
                            " mesh, got " + to_string(bulk.mesh().mode));
    }
    options.transport_gradients = flags_of(variant).transport_gradients;
    return assemble_reduced_forms(bulk, iface, data, options);
}

double relative_residual(const SparseSystem& system, const Eigen::VectorXd& x)
{
    const double r = (system.matrix * x - system.rhs).norm();
    const double b = system.rhs.norm();
    return b > 0.0 ? r / b : r;
}

double symmetry_defect(const Eigen::SparseMatrix<double>& a)
{
    const Eigen::SparseMatrix<double> at = a.transpose();
    const Eigen::SparseMatrix<double> diff = a - at;
    double max_a = 0.0;
    double max_d = 0.0;
    for (int k = 0; k < a.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
            max_a = std::max(max_a, std::abs(it.value()));
        }
        for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it) {
            max_d = std::max(max_d, std::abs(it.value()));
        }
    }
    return max_a > 0.0 ? max_d / max_a : 0.0;
}

void write_matrix(std::ostream& out, const SparseSystem& system)
{
    out << std::setprecision(17);
    Eigen::SparseMatrix<double, Eigen::RowMajor> rows = system.matrix;
    for (int r = 0; r < rows.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rows, r); it; ++it) {
            out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
        }
    }
}

}  // namespace mdfrac
