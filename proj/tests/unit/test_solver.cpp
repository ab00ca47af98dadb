#include "mdfrac/solver.hpp"
#include "mdfrac/fields.hpp"

#include <gtest/gtest.h>

using namespace mdfrac;

namespace {

SparseSystem dense_system(const Eigen::MatrixXd& a, const Eigen::VectorXd& b)
{
    SparseSystem s;
    s.matrix = a.sparseView();
    s.rhs = b;
    s.bulk_dofs = static_cast<int>(b.size());
    return s;
}

SparseSystem poisson_system()
{
    auto mesh = std::make_shared<const Mesh>(build_square_mesh(12));
    BulkSpace space(mesh, 2);
    return assemble_full(space, PermeabilityData::isotropic(1.0, 1.0), [](const Vec2&) { return 1.0; },
                         [](const Vec2& x) { return x.x() * x.y(); });
}

}  // namespace

TEST(Solver, Identity)
{
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(5, -1.0, 3.0);
    for (SolveMethod m : {SolveMethod::direct_lu, SolveMethod::cg, SolveMethod::bicgstab, SolveMethod::automatic}) {
        SolveOptions o;
        o.method = m;
        const SolveResult r = solve(dense_system(Eigen::MatrixXd::Identity(5, 5), b), o);
        EXPECT_LT((r.x - b).norm(), 1e-14);
        EXPECT_LE(r.report.iterations, 1);
    }
}

TEST(Solver, TwoByTwo)
{
    Eigen::MatrixXd a(2, 2);
    a << 2, 1, 1, 2;
    for (SolveMethod m : {SolveMethod::direct_lu, SolveMethod::cg}) {
        SolveOptions o;
        o.method = m;
        const SolveResult r = solve(dense_system(a, Eigen::Vector2d(1, 1)), o);
        EXPECT_NEAR(r.x[0], 1.0 / 3.0, 1e-12);
        EXPECT_NEAR(r.x[1], 1.0 / 3.0, 1e-12);
    }
}

TEST(Solver, CgRejectsNonsymmetric)
{
    Eigen::MatrixXd a(2, 2);
    a << 2, 1, 0, 2;
    SolveOptions o;
    o.method = SolveMethod::cg;
    EXPECT_THROW(solve(dense_system(a, Eigen::Vector2d(1, 1)), o), std::invalid_argument);
    o.method = SolveMethod::automatic;
    const SolveResult r = solve(dense_system(a, Eigen::Vector2d(1, 1)), o);
    EXPECT_EQ(r.report.method, SolveMethod::direct_lu);
    EXPECT_NEAR(r.x[1], 0.5, 1e-14);
    EXPECT_NEAR(r.x[0], 0.25, 1e-14);
}

TEST(Solver, RejectsBadInput)
{
    SolveOptions o;
    o.tol = 1.5;
    EXPECT_THROW(solve(dense_system(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1, 1)), o),
                 std::invalid_argument);
    SparseSystem s = dense_system(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector3d(1, 1, 1));
    EXPECT_THROW(solve(s), std::invalid_argument);
    EXPECT_THROW(solve(dense_system(Eigen::MatrixXd::Zero(2, 2), Eigen::Vector2d(1, 1)), {}), SolveError);
}

TEST(Solver, NonConvergenceCarriesBestIterate)
{
    const SparseSystem sys = poisson_system();
    SolveOptions o;
    o.method = SolveMethod::cg;
    o.max_iter = 3;
    try {
        solve(sys, o);
        FAIL() << "expected SolveError";
    } catch (const SolveError& e) {
        EXPECT_EQ(e.best_iterate.size(), sys.size());
        EXPECT_EQ(e.report.iterations, 3);
        EXPECT_GT(e.report.relative_residual, o.tol);
        EXPECT_NEAR(e.report.relative_residual, relative_residual(sys, e.best_iterate), 1e-14);
    }
}

TEST(Solver, PostHocResidualAndAgreement)
{
    const SparseSystem sys = poisson_system();
    SolveOptions lu;
    lu.method = SolveMethod::direct_lu;
    // The solution error is bounded by cond(A) times the residual, so the
    // iterative runs use a tolerance well below the agreement target.
    SolveOptions cg;
    cg.method = SolveMethod::cg;
    cg.tol = 1e-13;
    SolveOptions bicg;
    bicg.method = SolveMethod::bicgstab;
    bicg.tol = 1e-13;
    const SolveResult a = solve(sys, lu);
    const SolveResult b = solve(sys, cg);
    const SolveResult c = solve(sys, bicg);
    for (const SolveResult* r : {&a, &b, &c}) {
        EXPECT_LE(r->report.relative_residual, 1e-10);
        EXPECT_NEAR(r->report.relative_residual, relative_residual(sys, r->x), 1e-15);
    }
    EXPECT_LT((a.x - b.x).norm(), 1e-8 * a.x.norm());
    EXPECT_LT((a.x - c.x).norm(), 1e-8 * a.x.norm());
    EXPECT_LE(relative_residual(sys, b.x), 1.01 * b.report.relative_residual);
}

TEST(Solver, MethodNames)
{
    for (SolveMethod m : {SolveMethod::automatic, SolveMethod::direct_lu, SolveMethod::cg, SolveMethod::bicgstab}) {
        EXPECT_EQ(parse_solve_method(to_string(m)), m);
    }
    EXPECT_THROW(parse_solve_method("gmres"), std::invalid_argument);
}
