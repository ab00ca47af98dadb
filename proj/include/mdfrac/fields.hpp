#pragma once

// Discrete fields: coefficient vectors interpreted against a DG space.

#include "mdfrac/dg_space.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <vector>

namespace mdfrac {

/// Bucket index over element bounding boxes for point location.
class PointLocator {
public:
    explicit PointLocator(const Mesh& mesh, int bins_per_direction = 0);

    /// Element containing x (barycentric tolerance `tol`), or -1.
    int locate(const Vec2& x, double tol = 1e-12) const;
    /// Elements whose bounding box intersects the horizontal line x2 = y.
    std::vector<int> crossing_row(double y) const;

private:
    const Mesh* mesh_;
    int nx_;
    int ny_;
    Vec2 lo_;
    Vec2 hi_;
    std::vector<std::vector<int>> bins_;
    std::vector<std::vector<int>> rows_;

    int bin_x(double x) const;
    int bin_y(double y) const;
};

/// Barycentric coordinates of x in element e.
Eigen::Vector3d barycentric(const Mesh& mesh, int element, const Vec2& x);

class BulkField {
public:
    BulkField() = default;
    BulkField(std::shared_ptr<const BulkSpace> space, Eigen::VectorXd coeffs);

    const BulkSpace& space() const { return *space_; }
    std::shared_ptr<const BulkSpace> space_ptr() const { return space_; }
    const Eigen::VectorXd& coeffs() const { return coeffs_; }

    double eval(int element, const Vec2& x) const;
    Vec2 grad(int element, const Vec2& x) const;
    /// Locates the element first; throws if x is outside the mesh.
    double eval(const Vec2& x) const;
    const PointLocator& locator() const;

private:
    std::shared_ptr<const BulkSpace> space_;
    Eigen::VectorXd coeffs_;
    mutable std::shared_ptr<PointLocator> locator_;
};

class InterfaceField {
public:
    InterfaceField() = default;
    /// `coeffs` uses the space's local numbering (element * (k + 1) + a).
    InterfaceField(std::shared_ptr<const InterfaceSpace> space, Eigen::VectorXd coeffs);

    const InterfaceSpace& space() const { return *space_; }
    const Eigen::VectorXd& coeffs() const { return coeffs_; }

    /// Interface element containing t (the left one at shared edges).
    int locate(double t) const;
    double eval(int element, double t) const;
    double deriv(int element, double t) const;
    double eval(double t) const { return eval(locate(t), t); }
    double deriv(double t) const { return deriv(locate(t), t); }

private:
    std::shared_ptr<const InterfaceSpace> space_;
    Eigen::VectorXd coeffs_;
};

/// L2 projection of a function onto the bulk space (element-wise mass solves).
Eigen::VectorXd project_bulk(const BulkSpace& space, const std::function<double(const Vec2&)>& f);

/// L2 projection onto the interface space, returned in local numbering.
Eigen::VectorXd project_interface(const InterfaceSpace& space, const std::function<double(double)>& f);

}  // namespace mdfrac
