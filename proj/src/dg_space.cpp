#include "mdfrac/dg_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdfrac {

int triangle_dofs(int degree)
{
    return (degree + 1) * (degree + 2) / 2;
}

BulkSpace::BulkSpace(std::shared_ptr<const Mesh> mesh, int degree)
    : BulkSpace(mesh, std::vector<int>(mesh ? mesh->elements.size() : 0, degree))
{
}

BulkSpace::BulkSpace(std::shared_ptr<const Mesh> mesh, std::vector<int> degrees)
    : mesh_(std::move(mesh)), degrees_(std::move(degrees))
{
    if (!mesh_) {
        throw std::invalid_argument("bulk space: null mesh");
    }
    if (degrees_.size() != mesh_->elements.size()) {
        throw std::invalid_argument("bulk space: one degree per element required");
    }
    offsets_.resize(degrees_.size() + 1, 0);
    jinv_t_.resize(degrees_.size());
    for (std::size_t e = 0; e < degrees_.size(); ++e) {
        if (degrees_[e] < 1 || degrees_[e] > 3) {
            throw std::invalid_argument("bulk space: polynomial degree must be in [1, 3]");
        }
        max_degree_ = std::max(max_degree_, degrees_[e]);
        offsets_[e + 1] = offsets_[e] + triangle_dofs(degrees_[e]);
        const int el = static_cast<int>(e);
        Mat2 jac;
        jac.col(0) = mesh_->vertex(el, 1) - mesh_->vertex(el, 0);
        jac.col(1) = mesh_->vertex(el, 2) - mesh_->vertex(el, 0);
        jinv_t_[e] = jac.inverse().transpose();
    }
}

BasisEval BulkSpace::eval_reference(int element, const Vec2& ref) const
{
    const int k = degrees_[element];
    const int n = triangle_dofs(k);
    BasisEval out;
    out.values.resize(n);
    out.grads.resize(n, 2);
    const double x = ref.x();
    const double y = ref.y();
    // powers x^a, y^b with a + b <= k, ordered by total degree then by b
    double px[4] = {1.0, x, x * x, x * x * x};
    double py[4] = {1.0, y, y * y, y * y * y};
    int i = 0;
    for (int total = 0; total <= k; ++total) {
        for (int b = 0; b <= total; ++b) {
            const int a = total - b;
            out.values(i) = px[a] * py[b];
            const Vec2 gref(a > 0 ? a * px[a - 1] * py[b] : 0.0, b > 0 ? b * px[a] * py[b - 1] : 0.0);
            out.grads.row(i) = (jinv_t_[element] * gref).transpose();
            ++i;
        }
    }
    return out;
}

BasisEval BulkSpace::eval(int element, const Vec2& x) const
{
    return eval_reference(element, mesh_->map_to_reference(element, x));
}

Eigen::VectorXd BulkSpace::values(int element, const Vec2& x) const
{
    return eval(element, x).values;
}

InterfaceSpace::InterfaceSpace(std::shared_ptr<const InterfaceGrid> grid, int degree, int global_offset)
    : grid_(std::move(grid)), degree_(degree), global_offset_(global_offset)
{
    if (!grid_) {
        throw std::invalid_argument("interface space: null grid");
    }
    if (degree_ < 1 || degree_ > 3) {
        throw std::invalid_argument("interface space: polynomial degree must be in [1, 3]");
    }
}

void InterfaceSpace::eval(int element, double t, Eigen::VectorXd& values, Eigen::VectorXd& derivs) const
{
    const InterfaceElement& el = grid_->elements[element];
    const double len = el.length();
    const double s = (t - el.t0) / len;
    values.resize(degree_ + 1);
    derivs.resize(degree_ + 1);
    double p = 1.0;
    for (int a = 0; a <= degree_; ++a) {
        values(a) = p;
        derivs(a) = a > 0 ? a * std::pow(s, a - 1) / len : 0.0;
        p *= s;
    }
}

}  // namespace mdfrac
