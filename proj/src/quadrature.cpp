#include "mdfrac/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace mdfrac {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the Legendre
// recurrence, weights come from the first eigenvector components.
LineRule compute_gauss_legendre(int n)
{
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double b = i / std::sqrt(4.0 * i * i - 1.0);
        jacobi(i, i - 1) = b;
        jacobi(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    LineRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double v = eig.eigenvectors()(0, i);
        rule.points[i] = 0.5 * (eig.eigenvalues()(i) + 1.0);
        rule.weights[i] = v * v;  // 2 v^2 on [-1, 1], halved for [0, 1]
    }
    return rule;
}

}  // namespace

LineRule gauss_legendre(int n)
{
    if (n < 1) {
        throw std::invalid_argument("gauss_legendre: need at least one point");
    }
    if (n == 1) {
        return LineRule{{0.5}, {1.0}};
    }
    static std::mutex mutex;
    static std::map<int, LineRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, compute_gauss_legendre(n)).first;
    }
    return it->second;
}

LineRule line_rule(int order)
{
    return gauss_legendre(std::max(1, (order + 2) / 2));
}

TriangleRule triangle_rule(int order)
{
    // (u, v) in [0,1]^2 -> (u, v (1 - u)) with Jacobian (1 - u); the extra
    // factor raises the degree in u by one.
    const LineRule gu = gauss_legendre(std::max(1, (order + 3) / 2));
    const LineRule gv = gauss_legendre(std::max(1, (order + 2) / 2));
    TriangleRule rule;
    for (std::size_t i = 0; i < gu.points.size(); ++i) {
        const double u = gu.points[i];
        for (std::size_t j = 0; j < gv.points.size(); ++j) {
            const double v = gv.points[j];
            rule.points.emplace_back(u, v * (1.0 - u));
            rule.weights.push_back(gu.weights[i] * gv.weights[j] * (1.0 - u));
        }
    }
    return rule;
}

}  // namespace mdfrac
