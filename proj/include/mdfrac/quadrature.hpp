#pragma once

#include <Eigen/Dense>

#include <vector>

namespace mdfrac {

/// Gauss-Legendre rule on [0, 1].
struct LineRule {
    std::vector<double> points;
    std::vector<double> weights;
};

/// Rule on the reference triangle (0,0), (1,0), (0,1); weights sum to 1/2.
struct TriangleRule {
    std::vector<Eigen::Vector2d> points;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, exact for polynomials of degree 2n - 1.
LineRule gauss_legendre(int n);

/// Smallest Gauss-Legendre rule exact for polynomials of degree `order`.
LineRule line_rule(int order);

/// Collapsed (Duffy) tensor Gauss rule exact for polynomials of total degree `order`.
TriangleRule triangle_rule(int order);

}  // namespace mdfrac
