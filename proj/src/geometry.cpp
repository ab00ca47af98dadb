#include "mdfrac/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mdfrac {

FractureFrame::FractureFrame(const Vec2& normal, double offset, double t_min, double t_max)
    : normal_(normal), offset_(offset), t_min_(t_min), t_max_(t_max)
{
    const double len = normal_.norm();
    if (!(len > 0.0) || !std::isfinite(len)) {
        throw GeometryError("fracture frame: normal must be a nonzero finite vector");
    }
    if (!(t_max > t_min)) {
        throw GeometryError("fracture frame: empty parameter range");
    }
    normal_ /= len;
    tangent_ = Vec2(-normal_.y(), normal_.x());
}

FractureFrame FractureFrame::unit_square_vertical(double x1)
{
    // tangent = (0, 1), so t = x2 and the parameter range is [0, 1].
    return FractureFrame(Vec2(1.0, 0.0), x1, 0.0, 1.0);
}

bool FractureFrame::contains_parameter(double t, double tol) const
{
    return t >= t_min_ - tol && t <= t_max_ + tol;
}

Vec2 project_to_gamma(const Vec2& x, const FractureFrame& frame)
{
    return frame.point(0.0, frame.t(x));
}

ApertureProfile::ApertureProfile(ApertureKind kind, Fn d1, Fn d2, Fn dd1, Fn dd2)
    : kind_(kind), d1_(std::move(d1)), d2_(std::move(d2)), dd1_(std::move(dd1)), dd2_(std::move(dd2))
{
}

ApertureProfile ApertureProfile::constant(double d1, double d2)
{
    if (!(d1 + d2 > 0.0)) {
        throw GeometryError("constant aperture: total aperture d1 + d2 must be positive");
    }
    auto zero = [](double) { return 0.0; };
    return ApertureProfile(
        ApertureKind::constant, [d1](double) { return d1; }, [d2](double) { return d2; }, zero, zero);
}

ApertureProfile ApertureProfile::sinusoidal(const SinusoidalParams& p)
{
    if (!(p.d0 > 0.0)) {
        throw GeometryError("sinusoidal aperture: d0 must be positive");
    }
    const double a = 0.5 * p.d0;
    const double w = p.frequency;
    const double phi = p.phase;
    const double d0 = p.d0;
    const double s2 = p.asymmetry == Asymmetry::antisymmetric ? -1.0 : 1.0;
    ApertureProfile profile(
        ApertureKind::sinusoidal,
        [=](double t) { return d0 + a * std::sin(w * t + phi); },
        [=](double t) { return d0 + s2 * a * std::sin(w * t + phi); },
        [=](double t) { return a * w * std::cos(w * t + phi); },
        [=](double t) { return s2 * a * w * std::cos(w * t + phi); });
    profile.sinusoidal_ = p;
    return profile;
}

ApertureProfile ApertureProfile::custom(Fn d1, Fn d2, Fn dd1, Fn dd2)
{
    if (!d1 || !d2 || !dd1 || !dd2) {
        throw GeometryError("custom aperture: all four closures are required");
    }
    return ApertureProfile(ApertureKind::custom, std::move(d1), std::move(d2), std::move(dd1), std::move(dd2));
}

ApertureProfile& ApertureProfile::set_d_min(double d_min)
{
    if (d_min < 0.0) {
        throw GeometryError("aperture: d_min must be nonnegative");
    }
    d_min_ = d_min;
    return *this;
}

ApertureSample eval_aperture_at(const ApertureProfile& profile, const FractureFrame& frame, double t)
{
    if (!frame.contains_parameter(t)) {
        std::ostringstream msg;
        msg << "aperture query at t = " << t << " outside Gamma's parameter range [" << frame.t_min() << ", "
            << frame.t_max() << "]";
        throw GeometryError(msg.str());
    }
    ApertureSample s;
    s.d1 = profile.d1(t);
    s.d2 = profile.d2(t);
    s.d = s.d1 + s.d2;
    if (!(s.d > profile.d_min()) || !std::isfinite(s.d)) {
        std::ostringstream msg;
        msg << "aperture d = " << s.d << " at t = " << t << " does not exceed d_min = " << profile.d_min();
        throw GeometryError(msg.str());
    }
    s.grad_d1 = profile.dd1(t) * frame.tangent();
    s.grad_d2 = profile.dd2(t) * frame.tangent();
    return s;
}

ApertureSample eval_aperture(const ApertureProfile& profile, const FractureFrame& frame, const Vec2& x_on_gamma)
{
    if (std::abs(frame.eta(x_on_gamma)) > 1e-10) {
        throw GeometryError("aperture query point does not lie on Gamma");
    }
    return eval_aperture_at(profile, frame, frame.t(x_on_gamma));
}

std::pair<Vec2, Vec2> interface_normals(const ApertureProfile& profile, const FractureFrame& frame, double t)
{
    const ApertureSample s = eval_aperture_at(profile, frame, t);
    const Vec2& n = frame.normal();
    Vec2 n1 = (-n - s.grad_d1) / std::sqrt(1.0 + s.grad_d1.squaredNorm());
    Vec2 n2 = (n - s.grad_d2) / std::sqrt(1.0 + s.grad_d2.squaredNorm());
    return {n1, n2};
}

JumpAverage scalar_jump_avg(double trace1, double trace2)
{
    return {trace2 - trace1, 0.5 * (trace1 + trace2)};
}

JumpAverage flux_jump_avg(const Vec2& flux1, const Vec2& flux2, const ApertureSample& aperture,
                          const FractureFrame& frame)
{
    const Vec2& n = frame.normal();
    const double w1 = flux1.dot(n + aperture.grad_d1);
    const double w2 = flux2.dot(n - aperture.grad_d2);
    return {w1 - w2, 0.5 * (w1 + w2)};
}

JumpAverage continuous_jump_avg(std::span<const double> trace1, std::span<const double> trace2,
                                const ApertureSample& aperture, const FractureFrame& frame, TraceKind kind)
{
    const std::size_t expected = kind == TraceKind::scalar ? 1 : 2;
    if (trace1.size() != expected || trace2.size() != expected) {
        std::ostringstream msg;
        msg << "jump/average: " << (kind == TraceKind::scalar ? "scalar" : "vector") << " traces need "
            << expected << " component(s), got " << trace1.size() << " and " << trace2.size();
        throw GeometryError(msg.str());
    }
    if (kind == TraceKind::scalar) {
        return scalar_jump_avg(trace1[0], trace2[0]);
    }
    return flux_jump_avg(Vec2(trace1[0], trace1[1]), Vec2(trace2[0], trace2[1]), aperture, frame);
}

PermeabilityData PermeabilityData::isotropic(double k_bulk, double k_frac, double xi)
{
    PermeabilityData data;
    data.k1 = [k_bulk](const Vec2&) -> Mat2 { return k_bulk * Mat2::Identity(); };
    data.k2 = data.k1;
    data.k_fracture = [k_frac](const Vec2&) -> Mat2 { return k_frac * Mat2::Identity(); };
    data.k_gamma = [k_frac](double) { return k_frac; };
    data.k_perp = [k_frac](double) { return k_frac; };
    data.xi = xi;
    return data;
}

double PermeabilityData::beta(double t, double d) const
{
    return 4.0 * k_perp(t) / ((2.0 * xi - 1.0) * d);
}

void PermeabilityData::validate() const
{
    if (!(xi > 0.5)) {
        throw GeometryError("coupling parameter xi must satisfy xi > 1/2");
    }
}

void check_spd(const Mat2& k, const char* what)
{
    if (!k.allFinite()) {
        throw GeometryError(std::string(what) + ": permeability has non-finite entries");
    }
    if (std::abs(k(0, 1) - k(1, 0)) > 1e-12 * std::max(1.0, k.cwiseAbs().maxCoeff())) {
        throw GeometryError(std::string(what) + ": permeability is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat2> eig(k);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
        throw GeometryError(std::string(what) + ": permeability is not positive definite");
    }
}

WellposednessDiagnostic check_wellposedness(const ApertureProfile& profile, const FractureFrame& frame,
                                            const PermeabilityData& permeability, int samples_per_unit_length)
{
    permeability.validate();
    if (samples_per_unit_length < 1) {
        throw GeometryError("wellposedness: sampling resolution must be positive");
    }
    const int n = std::max(2, static_cast<int>(std::ceil(samples_per_unit_length * frame.length())) + 1);

    WellposednessDiagnostic diag;
    diag.kappa_min = std::numeric_limits<double>::infinity();
    diag.kappa_max = 0.0;
    diag.d_min = std::numeric_limits<double>::infinity();
    diag.d_max = 0.0;

    for (int i = 0; i < n; ++i) {
        const double t = frame.t_min() + frame.length() * static_cast<double>(i) / (n - 1);
        const double d1 = profile.d1(t);
        const double d2 = profile.d2(t);
        const double g1 = profile.dd1(t);
        const double g2 = profile.dd2(t);
        const double kg = permeability.k_gamma(t);
        const double kp = permeability.k_perp(t);
        if (!std::isfinite(d1) || !std::isfinite(d2) || !std::isfinite(g1) || !std::isfinite(g2) ||
            !std::isfinite(kg) || !std::isfinite(kp)) {
            std::ostringstream msg;
            msg << "wellposedness: non-finite field sample at t = " << t;
            throw GeometryError(msg.str());
        }
        const double d = d1 + d2;
        diag.d_min = std::min(diag.d_min, d);
        diag.d_max = std::max(diag.d_max, d);
        diag.grad_d_sup = std::max(diag.grad_d_sup, std::abs(g1 + g2));
        diag.grad_diff_sup = std::max(diag.grad_diff_sup, std::abs(g1 - g2));
        diag.kappa_min = std::min({diag.kappa_min, kg, kp});
        diag.kappa_max = std::max({diag.kappa_max, kg, kp});
    }
    if (!(diag.d_min > 0.0) || !(diag.kappa_min > 0.0)) {
        // The bound is unbounded when the aperture closes or the fracture
        // permeability degenerates.
        diag.lhs = std::numeric_limits<double>::infinity();
        diag.satisfied = false;
        return diag;
    }
    const double ratio = diag.kappa_max / diag.kappa_min;
    diag.lhs = ratio * ratio * (diag.d_max / diag.d_min) *
               ((2.0 * permeability.xi - 1.0) * diag.grad_d_sup * diag.grad_d_sup +
                diag.grad_diff_sup * diag.grad_diff_sup);
    diag.satisfied = diag.lhs < 16.0;
    return diag;
}

}  // namespace mdfrac
