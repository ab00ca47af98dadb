#include "mdfrac/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <sstream>

namespace mdfrac {

const char* to_string(SolveMethod method)
{
    switch (method) {
    case SolveMethod::automatic: return "auto";
    case SolveMethod::direct_lu: return "lu";
    case SolveMethod::cg: return "cg";
    case SolveMethod::bicgstab: return "bicgstab";
    }
    return "?";
}

SolveMethod parse_solve_method(const std::string& name)
{
    for (SolveMethod m : {SolveMethod::automatic, SolveMethod::direct_lu, SolveMethod::cg, SolveMethod::bicgstab}) {
        if (name == to_string(m)) {
            return m;
        }
    }
    throw std::invalid_argument("unknown solver method '" + name + "' (expected auto, lu, cg or bicgstab)");
}

namespace {

SolveResult run_method(const SparseSystem& system, SolveMethod method, const SolveOptions& options)
{
    const auto& a = system.matrix;
    SolveResult res;
    res.report.method = method;
    switch (method) {
    case SolveMethod::direct_lu: {
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(a);
        lu.factorize(a);
        if (lu.info() != Eigen::Success) {
            throw SolveError("solve: sparse LU factorisation failed (singular matrix?): " + lu.lastErrorMessage(),
                             Eigen::VectorXd::Zero(system.rhs.size()), res.report);
        }
        res.x = lu.solve(system.rhs);
        res.report.iterations = 1;
        break;
    }
    case SolveMethod::cg: {
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>>
            cg;
        cg.setTolerance(options.tol);
        cg.setMaxIterations(options.max_iter);
        cg.compute(a);
        res.x = cg.solve(system.rhs);
        res.report.iterations = static_cast<int>(cg.iterations());
        res.report.iteration_residual = cg.error();
        break;
    }
    case SolveMethod::bicgstab: {
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::DiagonalPreconditioner<double>> bicg;
        bicg.setTolerance(options.tol);
        bicg.setMaxIterations(options.max_iter);
        bicg.compute(a);
        res.x = bicg.solve(system.rhs);
        res.report.iterations = static_cast<int>(bicg.iterations());
        res.report.iteration_residual = bicg.error();
        break;
    }
    case SolveMethod::automatic: break;
    }
    res.report.relative_residual = relative_residual(system, res.x);
    if (method == SolveMethod::direct_lu) {
        res.report.iteration_residual = res.report.relative_residual;
    }
    return res;
}

}  // namespace

SolveResult solve(const SparseSystem& system, const SolveOptions& options)
{
    const auto& a = system.matrix;
    if (a.rows() != a.cols() || a.rows() != system.rhs.size()) {
        throw std::invalid_argument("solve: system is not square or rhs size mismatches");
    }
    if (!(options.tol > 0.0 && options.tol < 1.0)) {
        throw std::invalid_argument("solve: tol must lie in (0, 1)");
    }
    const bool automatic = options.method == SolveMethod::automatic;
    const bool symmetric = symmetry_defect(a) < options.symmetry_tol;
    SolveMethod method = options.method;
    if (automatic) {
        method = symmetric ? SolveMethod::cg : SolveMethod::direct_lu;
    }
    if (method == SolveMethod::cg && !symmetric) {
        throw std::invalid_argument("solve: CG requested for a nonsymmetric system");
    }
    if (system.rhs.size() == 0) {
        SolveResult empty;
        empty.report.method = method;
        return empty;
    }

    SolveResult res = run_method(system, method, options);
    if (automatic && method == SolveMethod::cg && !(res.report.relative_residual <= options.tol)) {
        // Thin fracture elements can stall diagonally preconditioned CG.
        res = run_method(system, SolveMethod::direct_lu, options);
    }
    if (!(res.report.relative_residual <= options.tol)) {
        std::ostringstream msg;
        msg << "solve: " << to_string(res.report.method) << " did not reach tol " << options.tol << " (residual "
            << res.report.relative_residual << " after " << res.report.iterations << " iterations)";
        throw SolveError(msg.str(), res.x, res.report);
    }
    return res;
}

}  // namespace mdfrac
