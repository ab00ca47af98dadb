#pragma once

// Fracture geometry: the reference line Gamma, aperture profiles on either
// side of it, interface normals and the jump/average operators that couple
// bulk traces across the fracture.

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace mdfrac {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Orthonormal frame (n, tau) of the hyperplane Gamma = { x : n.x = offset }.
/// A point is written x = eta * n + t * tau (+ offset * n), so eta is the signed
/// distance from Gamma and t the coordinate along it.
class FractureFrame {
public:
    /// `normal` is normalised; the tangent is the normal rotated by +90 degrees.
    FractureFrame(const Vec2& normal, double offset, double t_min, double t_max);

    /// Gamma = { x1 = 1/2 } in the unit square, normal pointing towards x1 > 1/2.
    static FractureFrame unit_square_vertical(double x1 = 0.5);

    const Vec2& normal() const { return normal_; }
    const Vec2& tangent() const { return tangent_; }
    double offset() const { return offset_; }
    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }
    double length() const { return t_max_ - t_min_; }

    double eta(const Vec2& x) const { return normal_.dot(x) - offset_; }
    double t(const Vec2& x) const { return tangent_.dot(x); }
    Vec2 point(double eta, double t) const { return (offset_ + eta) * normal_ + t * tangent_; }

    bool contains_parameter(double t, double tol = 1e-12) const;

private:
    Vec2 normal_;
    Vec2 tangent_;
    double offset_;
    double t_min_;
    double t_max_;
};

/// Orthogonal projection onto Gamma.
Vec2 project_to_gamma(const Vec2& x, const FractureFrame& frame);

enum class ApertureKind { constant, sinusoidal, custom };

enum class Asymmetry {
    antisymmetric,  ///< d2 = d0 - a*sin(...): serpentine fracture, constant total aperture
    symmetric,      ///< d2 = d1: Gamma is the centre line
};

struct SinusoidalParams {
    double d0 = 0.1;
    double frequency = 8.0 * 3.14159265358979323846;
    double phase = 0.0;
    Asymmetry asymmetry = Asymmetry::antisymmetric;
};

/// Scalar aperture data at one parameter value. Gradients are returned as
/// vectors lying in Gamma.
struct ApertureSample {
    double d1 = 0.0;
    double d2 = 0.0;
    double d = 0.0;
    Vec2 grad_d1 = Vec2::Zero();
    Vec2 grad_d2 = Vec2::Zero();
};

/// Aperture functions d1 (towards Omega_1) and d2 (towards Omega_2) as
/// closures in the tangential coordinate t, together with their analytic
/// derivatives. Either d1 or d2 may be negative; only d = d1 + d2 must stay
/// above d_min.
class ApertureProfile {
public:
    using Fn = std::function<double(double)>;

    static ApertureProfile constant(double d1, double d2);
    static ApertureProfile sinusoidal(const SinusoidalParams& params);
    /// User supplied closures; derivatives must be exact.
    static ApertureProfile custom(Fn d1, Fn d2, Fn dd1, Fn dd2);

    ApertureKind kind() const { return kind_; }
    const SinusoidalParams& sinusoidal_params() const { return sinusoidal_; }

    double d1(double t) const { return d1_(t); }
    double d2(double t) const { return d2_(t); }
    double d(double t) const { return d1_(t) + d2_(t); }
    /// Tangential derivatives.
    double dd1(double t) const { return dd1_(t); }
    double dd2(double t) const { return dd2_(t); }
    double dd(double t) const { return dd1_(t) + dd2_(t); }

    /// Lower bound enforced on d at every query (defaults to 0).
    double d_min() const { return d_min_; }
    ApertureProfile& set_d_min(double d_min);

private:
    ApertureProfile(ApertureKind kind, Fn d1, Fn d2, Fn dd1, Fn dd2);

    ApertureKind kind_;
    SinusoidalParams sinusoidal_{};
    Fn d1_, d2_, dd1_, dd2_;
    double d_min_ = 0.0;
};

/// Aperture values and gradients at a point on Gamma. Throws GeometryError if
/// the point lies outside Gamma's parameter range or d <= d_min there.
ApertureSample eval_aperture(const ApertureProfile& profile, const FractureFrame& frame, const Vec2& x_on_gamma);
ApertureSample eval_aperture_at(const ApertureProfile& profile, const FractureFrame& frame, double t);

/// Unit normals of Gamma_1 and Gamma_2 pointing into Omega_1 and Omega_2.
std::pair<Vec2, Vec2> interface_normals(const ApertureProfile& profile, const FractureFrame& frame, double t);

enum class TraceKind { scalar, vector };

struct JumpAverage {
    double jump = 0.0;
    double average = 0.0;
};

/// Jump and average across the fracture. Scalar traces: jump = tr2 - tr1.
/// Vector traces (fluxes) are weighted with n + grad d1 and n - grad d2.
JumpAverage continuous_jump_avg(std::span<const double> trace1, std::span<const double> trace2,
                                const ApertureSample& aperture, const FractureFrame& frame, TraceKind kind);

JumpAverage scalar_jump_avg(double trace1, double trace2);
JumpAverage flux_jump_avg(const Vec2& flux1, const Vec2& flux2, const ApertureSample& aperture,
                          const FractureFrame& frame);

/// Permeability data of the bulk, the fracture and its effective counterparts.
/// In two dimensions the tangential fracture permeability is a scalar.
struct PermeabilityData {
    std::function<Mat2(const Vec2&)> k1 = [](const Vec2&) { return Mat2::Identity(); };
    std::function<Mat2(const Vec2&)> k2 = [](const Vec2&) { return Mat2::Identity(); };
    /// Only used by the full-dimensional model.
    std::function<Mat2(const Vec2&)> k_fracture = [](const Vec2&) { return Mat2::Identity(); };
    std::function<double(double)> k_gamma = [](double) { return 1.0; };
    std::function<double(double)> k_perp = [](double) { return 1.0; };
    double xi = 2.0 / 3.0;

    /// Isotropic data: bulk k_bulk*I, fracture k_frac*I, K_Gamma = K_perp = k_frac.
    static PermeabilityData isotropic(double k_bulk, double k_frac, double xi = 2.0 / 3.0);

    /// 4 K_perp / ((2 xi - 1) d)
    double beta(double t, double d) const;

    /// Throws GeometryError if xi <= 1/2.
    void validate() const;
};

/// Symmetry and eigenvalue bounds of a 2x2 tensor; throws on violation.
void check_spd(const Mat2& k, const char* what);

struct WellposednessDiagnostic {
    double lhs = 0.0;
    bool satisfied = true;
    double kappa_min = 0.0;
    double kappa_max = 0.0;
    double d_min = 0.0;
    double d_max = 0.0;
    double grad_d_sup = 0.0;
    double grad_diff_sup = 0.0;
};

/// Sufficient coercivity condition of the reduced problem:
///   (kmax/kmin)^2 (D/dmin) [ (2xi-1) |grad d|^2_inf + |grad d1 - grad d2|^2_inf ] < 16,
/// with the sup norms and kappa bounds approximated by sampling Gamma.
WellposednessDiagnostic check_wellposedness(const ApertureProfile& profile, const FractureFrame& frame,
                                            const PermeabilityData& permeability,
                                            int samples_per_unit_length = 1024);

}  // namespace mdfrac
