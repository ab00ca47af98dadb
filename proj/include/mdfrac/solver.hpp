#pragma once

#include "mdfrac/assembly.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace mdfrac {

enum class SolveMethod { automatic, direct_lu, cg, bicgstab };

const char* to_string(SolveMethod method);
SolveMethod parse_solve_method(const std::string& name);

struct SolveReport {
    SolveMethod method = SolveMethod::direct_lu;
    int iterations = 0;
    /// ||A x - b|| / ||b||, recomputed after the solve
    double relative_residual = 0.0;
    /// residual estimate reported by the iteration (equal to the above for LU)
    double iteration_residual = 0.0;
};

class SolveError : public std::runtime_error {
public:
    SolveError(const std::string& what, Eigen::VectorXd best, SolveReport report)
        : std::runtime_error(what), best_iterate(std::move(best)), report(report)
    {
    }
    Eigen::VectorXd best_iterate;
    SolveReport report;
};

struct SolveOptions {
    SolveMethod method = SolveMethod::automatic;
    double tol = 1e-10;
    int max_iter = 20000;
    /// Relative symmetry defect below which CG is allowed.
    double symmetry_tol = 1e-10;
};

struct SolveResult {
    Eigen::VectorXd x;
    SolveReport report;
};

/// automatic: CG with diagonal preconditioning for symmetric systems, falling
/// back to sparse LU if CG misses the tolerance; sparse LU for nonsymmetric
/// systems. Throws SolveError (carrying the best iterate) if the
/// post-hoc residual exceeds tol.
SolveResult solve(const SparseSystem& system, const SolveOptions& options = {});

}  // namespace mdfrac
