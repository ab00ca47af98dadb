#pragma once

// Discontinuous polynomial spaces: monomials on the reference triangle
// (bulk) and on the unit interval (interface), with global dof numbering.

#include "mdfrac/mesh.hpp"

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace mdfrac {

/// (k + 1)(k + 2) / 2
int triangle_dofs(int degree);

/// Values and physical gradients of all local basis functions at one point.
struct BasisEval {
    Eigen::VectorXd values;
    Eigen::Matrix<double, Eigen::Dynamic, 2> grads;
};

class BulkSpace {
public:
    BulkSpace(std::shared_ptr<const Mesh> mesh, int degree);
    BulkSpace(std::shared_ptr<const Mesh> mesh, std::vector<int> degrees);

    const Mesh& mesh() const { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
    int degree(int element) const { return degrees_[element]; }
    int max_degree() const { return max_degree_; }
    int local_dofs(int element) const { return triangle_dofs(degrees_[element]); }
    int offset(int element) const { return offsets_[element]; }
    int num_dofs() const { return offsets_.back(); }

    /// Basis at a reference point of the element.
    BasisEval eval_reference(int element, const Vec2& ref) const;
    /// Basis at a physical point (the element's polynomial is extended if the
    /// point lies slightly outside).
    BasisEval eval(int element, const Vec2& x) const;
    Eigen::VectorXd values(int element, const Vec2& x) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    std::vector<int> degrees_;
    std::vector<int> offsets_;
    int max_degree_ = 0;
    /// inverse-transpose Jacobians of the affine element maps
    std::vector<Mat2> jinv_t_;
};

class InterfaceSpace {
public:
    InterfaceSpace(std::shared_ptr<const InterfaceGrid> grid, int degree, int global_offset);

    const InterfaceGrid& grid() const { return *grid_; }
    std::shared_ptr<const InterfaceGrid> grid_ptr() const { return grid_; }
    int degree() const { return degree_; }
    int local_dofs() const { return degree_ + 1; }
    /// Global index of the first dof of an interface element.
    int offset(int element) const { return global_offset_ + element * (degree_ + 1); }
    int global_offset() const { return global_offset_; }
    int num_dofs() const { return grid_->num_elements() * (degree_ + 1); }

    /// Values and t-derivatives of the local basis at Gamma coordinate t.
    void eval(int element, double t, Eigen::VectorXd& values, Eigen::VectorXd& derivs) const;

private:
    std::shared_ptr<const InterfaceGrid> grid_;
    int degree_;
    int global_offset_;
};

}  // namespace mdfrac
