#include "mdfrac/assembly.hpp"
#include "mdfrac/fields.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

using namespace mdfrac;

namespace {

const FractureFrame kFrame = FractureFrame::unit_square_vertical();

ApertureProfile sinusoid(double d0, Asymmetry a)
{
    SinusoidalParams p;
    p.d0 = d0;
    p.asymmetry = a;
    return ApertureProfile::sinusoidal(p);
}

double max_abs(const Eigen::SparseMatrix<double>& a)
{
    double m = 0.0;
    for (int k = 0; k < a.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
            m = std::max(m, std::abs(it.value()));
        }
    }
    return m;
}

/// Reduced discretisation on one mesh, independent of the variant table.
struct Reduced {
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const InterfaceGrid> grid;
    std::shared_ptr<const BulkSpace> bulk;
    std::shared_ptr<const InterfaceSpace> iface;
    ApertureProfile profile;
    PermeabilityData perm;
    ReducedData data;

    Reduced(MeshMode mode, ApertureProfile p, double h, int k, PermeabilityData k_data)
        : profile(std::move(p)), perm(std::move(k_data))
    {
        MeshOptions o;
        o.mode = mode;
        o.h = h;
        mesh = std::make_shared<const Mesh>(build_bulk_mesh(profile, kFrame, o));
        grid = std::make_shared<const InterfaceGrid>(build_interface_grid(*mesh, kFrame));
        bulk = std::make_shared<const BulkSpace>(mesh, k);
        iface = std::make_shared<const InterfaceSpace>(grid, k, bulk->num_dofs());
        data.profile = &profile;
        data.frame = &kFrame;
        data.permeability = &perm;
    }

    SparseSystem assemble(bool transport, const ReducedFormOptions& base = {}) const
    {
        ReducedFormOptions o = base;
        o.transport_gradients = transport;
        return assemble_reduced_forms(*bulk, *iface, data, o);
    }

    Eigen::VectorXd interpolate(const ScalarField& p, const GammaFunction& pg) const
    {
        Eigen::VectorXd x(bulk->num_dofs() + iface->num_dofs());
        x.head(bulk->num_dofs()) = project_bulk(*bulk, p);
        x.tail(iface->num_dofs()) = project_interface(*iface, pg);
        return x;
    }

    void set_boundary(const ScalarField& g, const GammaFunction& gg)
    {
        data.g_bulk = g;
        data.g_gamma = gg;
    }
};

}  // namespace

TEST(Penalty, ExamplesAndMaxRule)
{
    const std::array<int, 1> k1{1};
    const std::array<double, 1> h1{0.1};
    EXPECT_NEAR(penalty_bulk(k1, h1, 1.0), 60.0, 1e-12);
    const std::array<int, 2> k2{1, 1};
    const std::array<double, 2> same{0.1, 0.1};
    EXPECT_NEAR(penalty_bulk(k2, same, 1.0), 60.0, 1e-12);
    const std::array<double, 2> mixed{0.1, 0.05};
    EXPECT_NEAR(penalty_bulk(k2, mixed, 1.0), 120.0, 1e-12);
    const std::array<int, 2> kk{1, 2};
    EXPECT_NEAR(penalty_bulk(kk, same, 2.0), 2.0 * 3.0 * 4.0 / 0.1, 1e-12);
    // Interface edges use the interface dimension.
    EXPECT_NEAR(penalty(k1, h1, 1.0, 1), 40.0, 1e-12);
    const std::array<double, 1> zero{0.0};
    EXPECT_THROW(penalty_bulk(k1, zero, 1.0), AssemblyError);
    EXPECT_THROW(penalty_bulk(k1, h1, 0.0), AssemblyError);
}

TEST(DgJumpAverage, ClassicalOperators)
{
    const Vec2 n(1.0, 0.0);
    ScalarJumpAvg s = dg_jump_avg(2.5, 2.5, n, -n);
    EXPECT_EQ(s.jump, Vec2::Zero());
    EXPECT_DOUBLE_EQ(s.average, 2.5);
    s = dg_jump_avg(1.0, 3.0, n, -n);
    EXPECT_EQ(s.jump, Vec2(-2.0, 0.0));
    EXPECT_DOUBLE_EQ(s.average, 2.0);
    const VectorJumpAvg v = dg_jump_avg(Vec2(0.3, 1.0), Vec2(0.3, 1.0), n, -n);
    EXPECT_DOUBLE_EQ(v.jump, 0.0);
    EXPECT_EQ(v.average, Vec2(0.3, 1.0));
    const std::vector<double> one{1.0}, two{1.0, 2.0};
    EXPECT_THROW(dg_jump_avg(one, two, n, -n, TraceKind::scalar), AssemblyError);
    EXPECT_THROW(dg_jump_avg(one, one, n, -n, TraceKind::vector), AssemblyError);
    EXPECT_EQ(dg_jump_avg(two, two, n, -n, TraceKind::vector).jump[0], 0.0);
}

TEST(FullAssembly, ReproducesLinearPressure)
{
    for (int k = 1; k <= 2; ++k) {
        for (int n : {2, 5}) {
            auto mesh = std::make_shared<const Mesh>(build_square_mesh(n));
            BulkSpace space(mesh, k);
            auto g = [](const Vec2& x) { return 1.0 - x.x(); };
            const SparseSystem sys =
                assemble_full(space, PermeabilityData::isotropic(1.0, 1.0), [](const Vec2&) { return 0.0; }, g);
            EXPECT_LT(relative_residual(sys, project_bulk(space, g)), 1e-12);
        }
    }
}

TEST(FullAssembly, ConstantsWithFracture)
{
    MeshOptions o;
    o.mode = MeshMode::full;
    o.h = 1.0 / 8.0;
    auto mesh = std::make_shared<const Mesh>(build_bulk_mesh(sinusoid(0.1, Asymmetry::antisymmetric), kFrame, o));
    BulkSpace space(mesh, 1);
    auto c = [](const Vec2&) { return 0.7; };
    const SparseSystem sys =
        assemble_full(space, PermeabilityData::isotropic(1.0, 0.5), [](const Vec2&) { return 0.0; }, c);
    EXPECT_LT(relative_residual(sys, project_bulk(space, c)), 1e-12);
    EXPECT_LT(symmetry_defect(sys.matrix), 1e-10);
}

TEST(FullAssembly, SymmetricWithContrast)
{
    MeshOptions o;
    o.mode = MeshMode::full;
    o.h = 1.0 / 16.0;
    auto mesh = std::make_shared<const Mesh>(build_bulk_mesh(sinusoid(0.05, Asymmetry::symmetric), kFrame, o));
    for (int k = 1; k <= 2; ++k) {
        BulkSpace space(mesh, k);
        const SparseSystem sys = assemble_full(space, PermeabilityData::isotropic(1.0, 2.0),
                                               [](const Vec2&) { return 1.0; },
                                               [](const Vec2& x) { return x.y(); });
        EXPECT_LT(symmetry_defect(sys.matrix), 1e-10);
        EXPECT_EQ(sys.size(), space.num_dofs());
    }
}

TEST(FullAssembly, PenaltyScalesLinearly)
{
    auto mesh = std::make_shared<const Mesh>(build_square_mesh(4));
    BulkSpace space(mesh, 1);
    const auto k = PermeabilityData::isotropic(1.0, 1.0);
    auto zero = [](const Vec2&) { return 0.0; };
    auto at = [&](double mu) {
        FullAssemblyOptions o;
        o.mu0 = mu;
        return assemble_full(space, k, zero, zero, o).matrix;
    };
    const Eigen::SparseMatrix<double> a1 = at(5.0), a2 = at(10.0), a4 = at(20.0);
    const Eigen::SparseMatrix<double> p1 = a2 - a1;
    const Eigen::SparseMatrix<double> p2 = a4 - a2;
    EXPECT_GT(max_abs(p1), 0.0);
    EXPECT_LT(max_abs(p2 - 2.0 * p1), 1e-12 * max_abs(p2));
    // The penalty part is exactly the mu0-proportional part: A(5) - P(5) is mu-free.
    EXPECT_LT(max_abs((a1 - p1) - (a2 - 2.0 * p1)), 1e-12 * max_abs(a2));
}

TEST(FullAssembly, RejectsLowQuadratureAndReducedMeshes)
{
    auto mesh = std::make_shared<const Mesh>(build_square_mesh(2));
    BulkSpace space(mesh, 2);
    FullAssemblyOptions o;
    o.quad_order = 2;
    auto zero = [](const Vec2&) { return 0.0; };
    EXPECT_THROW(assemble_full(space, PermeabilityData::isotropic(1.0, 1.0), zero, zero, o), AssemblyError);

    MeshOptions mo;
    mo.mode = MeshMode::rectified;
    mo.h = 0.25;
    auto reduced = std::make_shared<const Mesh>(build_bulk_mesh(ApertureProfile::constant(0.1, 0.1), kFrame, mo));
    BulkSpace rs(reduced, 1);
    EXPECT_THROW(assemble_full(rs, PermeabilityData::isotropic(1.0, 1.0), zero, zero), AssemblyError);

    PermeabilityData missing = PermeabilityData::isotropic(1.0, 1.0);
    missing.k1 = nullptr;
    BulkSpace s1(mesh, 1);
    EXPECT_THROW(assemble_full(s1, missing, zero, zero), AssemblyError);
}

TEST(ReducedAssembly, ConstantApertureVariantsCoincide)
{
    // With constant d1, d2 the gradient terms vanish, so the forms of the
    // models with and without them agree on a common mesh.
    for (MeshMode mode : {MeshMode::curved_reduced, MeshMode::rectified}) {
        Reduced r(mode, ApertureProfile::constant(0.04, 0.04), 1.0 / 16.0, 1, PermeabilityData::isotropic(1.0, 0.5));
        r.set_boundary([](const Vec2& x) { return 1.0 - x.x(); }, [](double) { return 0.5; });
        const SparseSystem with = r.assemble(true);
        const SparseSystem without = r.assemble(false);
        EXPECT_LE(max_abs(with.matrix - without.matrix), 1e-12 * max_abs(with.matrix));
        EXPECT_LE((with.rhs - without.rhs).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(ReducedAssembly, LinearNormalPressureOnCurvedGap)
{
    // p = 1 - x1 and p_Gamma = 1/2: the bulk traces on Gamma_1/Gamma_2 are
    // 1/2 + d1 and 1/2 - d2, so the jump is -d and the normal flux is -1.
    for (bool transport : {false, true}) {
        Reduced r(MeshMode::curved_reduced, ApertureProfile::constant(0.05, 0.05), 1.0 / 8.0, 1,
                  PermeabilityData::isotropic(1.0, 1.0));
        auto p = [](const Vec2& x) { return 1.0 - x.x(); };
        auto pg = [](double) { return 0.5; };
        r.set_boundary(p, pg);
        const SparseSystem sys = r.assemble(transport);
        EXPECT_LT(relative_residual(sys, r.interpolate(p, pg)), 1e-10);
    }
}

TEST(ReducedAssembly, LinearTangentialPressure)
{
    // p = 1 - x2 with p_Gamma = 1 - t is exact for every model when d is constant.
    for (MeshMode mode : {MeshMode::curved_reduced, MeshMode::rectified}) {
        for (bool transport : {false, true}) {
            for (int k : {1, 2}) {
                Reduced r(mode, ApertureProfile::constant(0.03, 0.05), 1.0 / 8.0, k,
                          PermeabilityData::isotropic(1.0, 0.5));
                auto p = [](const Vec2& x) { return 1.0 - x.y(); };
                auto pg = [](double t) { return 1.0 - t; };
                r.set_boundary(p, pg);
                const SparseSystem sys = r.assemble(transport);
                EXPECT_LT(relative_residual(sys, r.interpolate(p, pg)), 1e-10)
                    << to_string(mode) << " transport " << transport << " k " << k;
            }
        }
    }
}

TEST(ReducedAssembly, MixedLinearPressureOnOffsetCurvedGap)
{
    // With K_f = K_bulk = I and a gap of constant but unequal half-widths, a
    // globally linear pressure with normal and tangential parts solves both
    // curved models, with p_Gamma equal to the transversal average.
    constexpr double d1 = 0.02, d2 = 0.06;
    for (bool transport : {false, true}) {
        for (int k : {1, 2}) {
            Reduced r(MeshMode::curved_reduced, ApertureProfile::constant(d1, d2), 1.0 / 16.0, k,
                      PermeabilityData::isotropic(1.0, 1.0));
            auto p = [](const Vec2& x) { return 1.0 - x.y() + 0.3 * (x.x() - 0.5); };
            auto pg = [](double t) { return 1.0 - t + 0.15 * (d2 - d1); };
            r.set_boundary(p, pg);
            const SparseSystem sys = r.assemble(transport);
            EXPECT_LT(relative_residual(sys, r.interpolate(p, pg)), 1e-10) << "transport " << transport << " k " << k;
        }
    }
}

TEST(ReducedAssembly, PrintedEdgeTermsBreakExactness)
{
    Reduced r(MeshMode::curved_reduced, ApertureProfile::constant(0.05, 0.05), 1.0 / 8.0, 1,
              PermeabilityData::isotropic(1.0, 1.0));
    auto p = [](const Vec2& x) { return 1.0 - x.y(); };
    auto pg = [](double t) { return 1.0 - t; };
    r.set_boundary(p, pg);
    ReducedFormOptions printed;
    printed.gamma_edge_terms = EdgeTermForm::printed;
    EXPECT_LT(relative_residual(r.assemble(false), r.interpolate(p, pg)), 1e-10);
    EXPECT_GT(relative_residual(r.assemble(false, printed), r.interpolate(p, pg)), 1e-6);
}

TEST(ReducedAssembly, CouplingBlocksSymmetric)
{
    // Without transport gradients the bulk rows/columns only see the SIPG
    // form and the coupling form; both are symmetric.
    Reduced r(MeshMode::curved_reduced, sinusoid(0.05, Asymmetry::antisymmetric), 1.0 / 8.0, 1,
              PermeabilityData::isotropic(1.0, 0.5));
    const SparseSystem sys = r.assemble(false);
    const int nb = sys.bulk_dofs;
    const int ni = sys.interface_dofs;
    const Eigen::MatrixXd a(sys.matrix);
    const double scale = a.cwiseAbs().maxCoeff();
    EXPECT_LT((a.topLeftCorner(nb, nb) - a.topLeftCorner(nb, nb).transpose()).cwiseAbs().maxCoeff(),
              1e-12 * scale);
    EXPECT_LT((a.topRightCorner(nb, ni) - a.bottomLeftCorner(ni, nb).transpose()).cwiseAbs().maxCoeff(),
              1e-12 * scale);
    EXPECT_GT(a.topRightCorner(nb, ni).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ReducedAssembly, ConstantApertureSystemSymmetric)
{
    Reduced r(MeshMode::rectified, ApertureProfile::constant(0.05, 0.05), 1.0 / 8.0, 2,
              PermeabilityData::isotropic(1.0, 0.5));
    EXPECT_LT(symmetry_defect(r.assemble(false).matrix), 1e-12);
}

TEST(ReducedAssembly, CouplingScalesWithBeta)
{
    // A(xi) = A_inf + M / (2 xi - 1): differences of systems at three xi
    // values are proportional.
    auto assemble_at = [](double xi) {
        Reduced r(MeshMode::rectified, sinusoid(0.05, Asymmetry::symmetric), 1.0 / 8.0, 1,
                  PermeabilityData::isotropic(1.0, 0.5, xi));
        return r.assemble(false).matrix;
    };
    const Eigen::SparseMatrix<double> a1 = assemble_at(2.0 / 3.0), a2 = assemble_at(1.0), a3 = assemble_at(3.0);
    const double c1 = 1.0 / (4.0 / 3.0 - 1.0), c2 = 1.0, c3 = 1.0 / 5.0;
    const Eigen::SparseMatrix<double> d12 = a1 - a2, d23 = a2 - a3;
    EXPECT_GT(max_abs(d12), 0.0);
    EXPECT_LT(max_abs(d12 - ((c1 - c2) / (c2 - c3)) * d23), 1e-12 * max_abs(d12));
}

TEST(ReducedAssembly, TransportTermsTouchOnlyInterfaceRows)
{
    Reduced r(MeshMode::curved_reduced, sinusoid(0.05, Asymmetry::antisymmetric), 1.0 / 8.0, 1,
              PermeabilityData::isotropic(1.0, 0.5));
    r.set_boundary([](const Vec2& x) { return 1.0 - x.x(); }, [](double) { return 0.5; });
    const SparseSystem with = r.assemble(true);
    const SparseSystem without = r.assemble(false);
    const Eigen::SparseMatrix<double> diff = with.matrix - without.matrix;
    double touched = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it) {
            if (it.value() != 0.0) {
                EXPECT_GE(it.row(), with.bulk_dofs);
                touched = std::max(touched, std::abs(it.value()));
            }
        }
    }
    EXPECT_GT(touched, 0.0);
    EXPECT_EQ(with.rhs.head(with.bulk_dofs), without.rhs.head(with.bulk_dofs));
}

TEST(ReducedAssembly, VariantMeshCheckAndDeterminism)
{
    Reduced curved(MeshMode::curved_reduced, sinusoid(0.05, Asymmetry::antisymmetric), 1.0 / 8.0, 1,
                   PermeabilityData::isotropic(1.0, 0.5));
    EXPECT_THROW(assemble_reduced(*curved.bulk, *curved.iface, curved.data, ModelVariant::IR, {}), AssemblyError);
    EXPECT_THROW(assemble_reduced(*curved.bulk, *curved.iface, curved.data, ModelVariant::IIR, {}), AssemblyError);
    EXPECT_THROW(assemble_reduced(*curved.bulk, *curved.iface, curved.data, ModelVariant::full, {}), AssemblyError);
    const SparseSystem a = assemble_reduced(*curved.bulk, *curved.iface, curved.data, ModelVariant::I, {});
    const SparseSystem b = assemble_reduced(*curved.bulk, *curved.iface, curved.data, ModelVariant::I, {});
    EXPECT_EQ(max_abs(a.matrix - b.matrix), 0.0);
    EXPECT_EQ(a.rhs, b.rhs);
    EXPECT_EQ(a.size(), a.bulk_dofs + a.interface_dofs);
    EXPECT_EQ(static_cast<int>(a.dof_map.size()), a.size());

    Reduced rect(MeshMode::rectified, sinusoid(0.05, Asymmetry::antisymmetric), 1.0 / 8.0, 1,
                 PermeabilityData::isotropic(1.0, 0.5));
    EXPECT_THROW(assemble_reduced(*rect.bulk, *rect.iface, rect.data, ModelVariant::I, {}), AssemblyError);
    EXPECT_NO_THROW(assemble_reduced(*rect.bulk, *rect.iface, rect.data, ModelVariant::IIR, {}));
}

TEST(ReducedAssembly, MatrixDumpFormat)
{
    Reduced r(MeshMode::rectified, ApertureProfile::constant(0.05, 0.05), 0.5, 1,
              PermeabilityData::isotropic(1.0, 0.5));
    const SparseSystem sys = r.assemble(false);
    std::ostringstream out;
    write_matrix(out, sys);
    std::istringstream in(out.str());
    int row = 0, col = 0, lines = 0;
    double value = 0.0;
    Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(sys.size(), sys.size());
    while (in >> row >> col >> value) {
        rebuilt(row, col) += value;
        ++lines;
    }
    EXPECT_EQ(lines, sys.matrix.nonZeros());
    EXPECT_EQ((rebuilt - Eigen::MatrixXd(sys.matrix)).cwiseAbs().maxCoeff(), 0.0);
}
