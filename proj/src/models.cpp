#include "mdfrac/models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace mdfrac {

std::vector<std::string> preset_names()
{
    return {"perp-asym", "perp-sym", "tangential", "manufactured"};
}

void use_trace_of_g_on_gamma(Problem& problem)
{
    const ScalarField g = problem.g;
    const FractureFrame frame = problem.frame;
    problem.g_gamma = [g, frame](double t) { return g(frame.point(0.0, t)); };
}

Problem make_preset(const std::string& name, double d0, double xi)
{
    Problem p;
    p.name = name;
    SinusoidalParams sp;
    sp.d0 = d0;
    if (name == "perp-asym" || name == "perp-sym") {
        sp.asymmetry = name == "perp-asym" ? Asymmetry::antisymmetric : Asymmetry::symmetric;
        p.profile = ApertureProfile::sinusoidal(sp);
        p.permeability = PermeabilityData::isotropic(1.0, 0.5, xi);
        p.g = [](const Vec2& x) { return 1.0 - x.x(); };
    } else if (name == "tangential") {
        sp.asymmetry = Asymmetry::symmetric;
        p.profile = ApertureProfile::sinusoidal(sp);
        p.permeability = PermeabilityData::isotropic(1.0, 2.0, xi);
        p.g = [](const Vec2& x) { return 4.0 * x.x() * (1.0 - x.x()) * (1.0 - x.y()); };
    } else if (name == "manufactured") {
        constexpr double pi = std::numbers::pi;
        p.profile = ApertureProfile::constant(0.5 * d0, 0.5 * d0);
        p.permeability = PermeabilityData::isotropic(1.0, 1.0, xi);
        p.exact = [](const Vec2& x) { return std::sin(pi * x.x() + 0.5) * std::sin(pi * x.y() + 0.25); };
        p.g = p.exact;
        p.q = [](const Vec2& x) { return 2.0 * pi * pi * std::sin(pi * x.x() + 0.5) * std::sin(pi * x.y() + 0.25); };
        p.homogeneous = true;
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    use_trace_of_g_on_gamma(p);
    return p;
}

FullSolution run_full(const Problem& problem, const RunOptions& options)
{
    MeshOptions mo;
    mo.mode = problem.homogeneous ? MeshMode::homogeneous : MeshMode::full;
    mo.h = options.h;
    mo.fracture_layers = options.fracture_layers;
    auto mesh = std::make_shared<const Mesh>(build_bulk_mesh(problem.profile, problem.frame, mo));
    auto space = std::make_shared<const BulkSpace>(mesh, options.degree);
    FullAssemblyOptions fo;
    fo.mu0 = options.mu0_bulk;
    const SparseSystem sys = assemble_full(*space, problem.permeability, problem.q, problem.g, fo);
    SolveResult res = solve(sys, options.solver);
    FullSolution sol;
    sol.mesh = mesh;
    sol.space = space;
    sol.pressure = BulkField(space, std::move(res.x));
    sol.report = res.report;
    sol.dofs = sys.size();
    return sol;
}

ReducedSetup setup_reduced(const Problem& problem, ModelVariant variant, const RunOptions& options)
{
    if (variant == ModelVariant::full) {
        throw std::invalid_argument("reduced run: variant must not be the full model");
    }
    const MeshMode expected = mesh_mode_of(variant);
    const MeshMode mode = options.mesh_mode.value_or(expected);
    if (mode != expected && !options.allow_mesh_override) {
        throw AssemblyError(std::string("variant ") + to_string(variant) + " requires a " + to_string(expected) +
                            " mesh, got " + to_string(mode));
    }
    MeshOptions mo;
    mo.mode = mode;
    mo.h = options.h;
    ReducedSetup setup;
    setup.mesh = std::make_shared<const Mesh>(build_bulk_mesh(problem.profile, problem.frame, mo));
    setup.grid = std::make_shared<const InterfaceGrid>(build_interface_grid(*setup.mesh, problem.frame));
    setup.bulk_space = std::make_shared<const BulkSpace>(setup.mesh, options.degree);
    setup.interface_space =
        std::make_shared<const InterfaceSpace>(setup.grid, options.interface_degree, setup.bulk_space->num_dofs());

    ReducedData data;
    data.profile = &problem.profile;
    data.frame = &problem.frame;
    data.permeability = &problem.permeability;
    data.q_bulk = problem.q;
    data.g_bulk = problem.g;
    data.q_gamma = problem.q_gamma;
    data.g_gamma = problem.g_gamma;
    ReducedFormOptions fo;
    fo.transport_gradients = flags_of(variant).transport_gradients;
    fo.mu0_bulk = options.mu0_bulk;
    fo.mu0_gamma = options.mu0_gamma;
    fo.gamma_edge_terms = options.gamma_edge_terms;
    fo.transport_edge_terms = options.transport_edge_terms;
    setup.system = mode == expected ? assemble_reduced(*setup.bulk_space, *setup.interface_space, data, variant, fo)
                                    : assemble_reduced_forms(*setup.bulk_space, *setup.interface_space, data, fo);
    return setup;
}

ReducedSolution run_reduced(const Problem& problem, ModelVariant variant, const RunOptions& options)
{
    ReducedSolution sol;
    sol.variant = variant;
    sol.profile = problem.profile;
    sol.frame = problem.frame;
    sol.permeability = problem.permeability;
    sol.transport_gradients = flags_of(variant).transport_gradients;
    sol.wellposedness = check_wellposedness(problem.profile, problem.frame, problem.permeability);
    if (!sol.wellposedness.satisfied) {
        std::ostringstream msg;
        msg << "wellposedness condition not met for variant " << to_string(variant) << " (lhs "
            << sol.wellposedness.lhs << " >= 16); solving anyway";
        sol.warnings.push_back(msg.str());
    }

    ReducedSetup setup = setup_reduced(problem, variant, options);
    SolveOptions so = options.solver;
    SolveResult res = solve(setup.system, so);
    const int nb = setup.bulk_space->num_dofs();
    const int ni = setup.interface_space->num_dofs();
    sol.mesh = setup.mesh;
    sol.grid = setup.grid;
    sol.bulk_space = setup.bulk_space;
    sol.interface_space = setup.interface_space;
    sol.bulk = BulkField(setup.bulk_space, res.x.head(nb));
    sol.interface = InterfaceField(setup.interface_space, res.x.tail(ni));
    sol.report = res.report;
    sol.bulk_dofs = nb;
    sol.interface_dofs = ni;
    return sol;
}

std::pair<double, double> bulk_traces(const ReducedSolution& solution, double t)
{
    const int el = solution.interface.locate(t);
    const InterfaceGrid& grid = *solution.grid;
    double values[2];
    for (int side = 0; side < 2; ++side) {
        const SidePairing& p = grid.elements[el].side[side];
        const Vec2 x = solution.mesh->facet_point(p.facet, grid.facet_parameter(el, side, t));
        values[side] = solution.bulk.eval(p.element, x);
    }
    return {values[0], values[1]};
}

Vec2 effective_velocity(const ReducedSolution& solution, double t)
{
    const ApertureProfile& prof = solution.profile;
    const double k = solution.permeability.k_gamma(t);
    const int el = solution.interface.locate(t);
    const double p = solution.interface.eval(el, t);
    const double dp = solution.interface.deriv(el, t);
    double flux = prof.dd(t) * p + prof.d(t) * dp;
    if (solution.transport_gradients) {
        const auto [p1, p2] = bulk_traces(solution, t);
        flux -= p1 * prof.dd1(t) + p2 * prof.dd2(t);
    }
    return -k * flux * solution.frame.tangent();
}

}  // namespace mdfrac
