#include "mdfrac/fields.hpp"

#include "mdfrac/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mdfrac {

Eigen::Vector3d barycentric(const Mesh& mesh, int e, const Vec2& x)
{
    const Vec2 ref = mesh.map_to_reference(e, x);
    return Eigen::Vector3d(1.0 - ref.x() - ref.y(), ref.x(), ref.y());
}

PointLocator::PointLocator(const Mesh& mesh, int bins) : mesh_(&mesh)
{
    if (mesh.elements.empty()) {
        throw MeshError("point locator: empty mesh");
    }
    const int n = bins > 0 ? bins : std::max(1, static_cast<int>(std::sqrt(mesh.elements.size() / 2.0)));
    nx_ = n;
    ny_ = n;
    lo_ = mesh.vertices.front();
    hi_ = lo_;
    for (const Vec2& v : mesh.vertices) {
        lo_ = lo_.cwiseMin(v);
        hi_ = hi_.cwiseMax(v);
    }
    bins_.resize(static_cast<std::size_t>(nx_) * ny_);
    rows_.resize(ny_);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        Vec2 blo = mesh.vertex(e, 0);
        Vec2 bhi = blo;
        for (int j = 1; j < 3; ++j) {
            blo = blo.cwiseMin(mesh.vertex(e, j));
            bhi = bhi.cwiseMax(mesh.vertex(e, j));
        }
        const int i0 = bin_x(blo.x());
        const int i1 = bin_x(bhi.x());
        const int j0 = bin_y(blo.y());
        const int j1 = bin_y(bhi.y());
        for (int j = j0; j <= j1; ++j) {
            rows_[j].push_back(e);
            for (int i = i0; i <= i1; ++i) {
                bins_[static_cast<std::size_t>(j) * nx_ + i].push_back(e);
            }
        }
    }
}

int PointLocator::bin_x(double x) const
{
    const double w = hi_.x() - lo_.x();
    const int i = static_cast<int>(std::floor((x - lo_.x()) / w * nx_));
    return std::clamp(i, 0, nx_ - 1);
}

int PointLocator::bin_y(double y) const
{
    const double w = hi_.y() - lo_.y();
    const int j = static_cast<int>(std::floor((y - lo_.y()) / w * ny_));
    return std::clamp(j, 0, ny_ - 1);
}

int PointLocator::locate(const Vec2& x, double tol) const
{
    const auto& cand = bins_[static_cast<std::size_t>(bin_y(x.y())) * nx_ + bin_x(x.x())];
    int best = -1;
    double best_min = -std::numeric_limits<double>::infinity();
    for (int e : cand) {
        const double m = barycentric(*mesh_, e, x).minCoeff();
        if (m > best_min) {
            best_min = m;
            best = e;
        }
    }
    return best_min >= -tol ? best : -1;
}

std::vector<int> PointLocator::crossing_row(double y) const
{
    std::vector<int> out;
    for (int e : rows_[bin_y(y)]) {
        double ylo = mesh_->vertex(e, 0).y();
        double yhi = ylo;
        for (int j = 1; j < 3; ++j) {
            ylo = std::min(ylo, mesh_->vertex(e, j).y());
            yhi = std::max(yhi, mesh_->vertex(e, j).y());
        }
        if (y >= ylo - 1e-14 && y <= yhi + 1e-14) {
            out.push_back(e);
        }
    }
    return out;
}

BulkField::BulkField(std::shared_ptr<const BulkSpace> space, Eigen::VectorXd coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs))
{
    if (coeffs_.size() != space_->num_dofs()) {
        throw std::invalid_argument("bulk field: coefficient count does not match the space");
    }
}

double BulkField::eval(int e, const Vec2& x) const
{
    const Eigen::VectorXd v = space_->values(e, x);
    return v.dot(coeffs_.segment(space_->offset(e), v.size()));
}

Vec2 BulkField::grad(int e, const Vec2& x) const
{
    const BasisEval b = space_->eval(e, x);
    return b.grads.transpose() * coeffs_.segment(space_->offset(e), b.values.size());
}

const PointLocator& BulkField::locator() const
{
    if (!locator_) {
        locator_ = std::make_shared<PointLocator>(space_->mesh());
    }
    return *locator_;
}

double BulkField::eval(const Vec2& x) const
{
    const int e = locator().locate(x, 1e-10);
    if (e < 0) {
        std::ostringstream msg;
        msg << "bulk field: point (" << x.x() << ", " << x.y() << ") is outside the mesh";
        throw MeshError(msg.str());
    }
    return eval(e, x);
}

InterfaceField::InterfaceField(std::shared_ptr<const InterfaceSpace> space, Eigen::VectorXd coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs))
{
    if (coeffs_.size() != space_->num_dofs()) {
        throw std::invalid_argument("interface field: coefficient count does not match the space");
    }
}

int InterfaceField::locate(double t) const
{
    const auto& els = space_->grid().elements;
    const double tol = 1e-12 * (els.back().t1 - els.front().t0);
    if (t < els.front().t0 - tol || t > els.back().t1 + tol) {
        std::ostringstream msg;
        msg << "interface field: t = " << t << " is outside the interface grid";
        throw std::out_of_range(msg.str());
    }
    auto it = std::lower_bound(els.begin(), els.end(), t,
                               [](const InterfaceElement& el, double v) { return el.t1 < v; });
    if (it == els.end()) {
        return static_cast<int>(els.size()) - 1;
    }
    return static_cast<int>(it - els.begin());
}

double InterfaceField::eval(int e, double t) const
{
    Eigen::VectorXd v, dv;
    space_->eval(e, t, v, dv);
    return v.dot(coeffs_.segment(static_cast<Eigen::Index>(e) * space_->local_dofs(), v.size()));
}

double InterfaceField::deriv(int e, double t) const
{
    Eigen::VectorXd v, dv;
    space_->eval(e, t, v, dv);
    return dv.dot(coeffs_.segment(static_cast<Eigen::Index>(e) * space_->local_dofs(), v.size()));
}

Eigen::VectorXd project_bulk(const BulkSpace& space, const std::function<double(const Vec2&)>& f)
{
    const Mesh& mesh = space.mesh();
    Eigen::VectorXd out(space.num_dofs());
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const TriangleRule rule = triangle_rule(2 * space.degree(e) + 4);
        const int n = space.local_dofs(e);
        Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        const double jac = 2.0 * mesh.area(e);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const BasisEval b = space.eval_reference(e, rule.points[q]);
            const double w = rule.weights[q] * jac;
            mass += w * b.values * b.values.transpose();
            rhs += w * f(mesh.map_to_physical(e, rule.points[q])) * b.values;
        }
        out.segment(space.offset(e), n) = mass.ldlt().solve(rhs);
    }
    return out;
}

Eigen::VectorXd project_interface(const InterfaceSpace& space, const std::function<double(double)>& f)
{
    const int n = space.local_dofs();
    Eigen::VectorXd out(space.num_dofs());
    const LineRule rule = line_rule(2 * space.degree() + 8);
    for (int e = 0; e < space.grid().num_elements(); ++e) {
        const InterfaceElement& el = space.grid().elements[e];
        Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd v, dv;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double t = el.t0 + rule.points[q] * el.length();
            const double w = rule.weights[q] * el.length();
            space.eval(e, t, v, dv);
            mass += w * v * v.transpose();
            rhs += w * f(t) * v;
        }
        out.segment(static_cast<Eigen::Index>(e) * n, n) = mass.ldlt().solve(rhs);
    }
    return out;
}

}  // namespace mdfrac
