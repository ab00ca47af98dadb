#include "mdfrac/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace mdfrac;

namespace {

constexpr double pi = std::numbers::pi;

ApertureProfile serpentine(double d0)
{
    SinusoidalParams p;
    p.d0 = d0;
    return ApertureProfile::sinusoidal(p);
}

ApertureProfile symmetric_profile(double d0)
{
    SinusoidalParams p;
    p.d0 = d0;
    p.asymmetry = Asymmetry::symmetric;
    return ApertureProfile::sinusoidal(p);
}

}  // namespace

TEST(Frame, OrthonormalAndCoordinates)
{
    const FractureFrame f = FractureFrame::unit_square_vertical();
    EXPECT_NEAR(f.normal().norm(), 1.0, 1e-12);
    EXPECT_NEAR(f.tangent().norm(), 1.0, 1e-12);
    EXPECT_NEAR(f.normal().dot(f.tangent()), 0.0, 1e-12);
    const Vec2 x(0.7, 0.3);
    EXPECT_NEAR(f.eta(x), 0.2, 1e-15);
    EXPECT_NEAR(f.t(x), 0.3, 1e-15);
    EXPECT_NEAR((f.point(f.eta(x), f.t(x)) - x).norm(), 0.0, 1e-15);

    const FractureFrame tilted(Vec2(1.0, 1.0), 0.3, -1.0, 1.0);
    EXPECT_NEAR(tilted.normal().norm(), 1.0, 1e-12);
    EXPECT_NEAR(tilted.normal().dot(tilted.tangent()), 0.0, 1e-12);
    EXPECT_THROW(FractureFrame(Vec2::Zero(), 0.0, 0.0, 1.0), GeometryError);
}

TEST(Frame, ProjectionIsIdempotent)
{
    const FractureFrame f = FractureFrame::unit_square_vertical();
    const Vec2 on(0.5, 0.25);
    EXPECT_NEAR((project_to_gamma(on, f) - on).norm(), 0.0, 1e-15);
    const Vec2 off = on + 0.17 * f.normal();
    EXPECT_NEAR((project_to_gamma(off, f) - on).norm(), 0.0, 1e-15);
    const Vec2 x(0.9, 0.6);
    const Vec2 p = project_to_gamma(x, f);
    EXPECT_NEAR(f.eta(p), 0.0, 1e-15);
    EXPECT_NEAR(f.t(p), f.t(x), 1e-15);
    EXPECT_NEAR((project_to_gamma(p, f) - p).norm(), 0.0, 1e-15);
}

TEST(Aperture, SerpentineValues)
{
    const FractureFrame f = FractureFrame::unit_square_vertical();
    const ApertureProfile prof = serpentine(0.1);
    ApertureSample s = eval_aperture(prof, f, Vec2(0.5, 0.0));
    EXPECT_NEAR(s.d1, 0.1, 1e-15);
    EXPECT_NEAR(s.d2, 0.1, 1e-15);
    EXPECT_NEAR(s.d, 0.2, 1e-15);
    s = eval_aperture(prof, f, Vec2(0.5, 1.0 / 16.0));
    EXPECT_NEAR(s.d1, 0.15, 1e-15);
    EXPECT_NEAR(s.d2, 0.05, 1e-15);
    EXPECT_NEAR(s.d, 0.2, 1e-15);
}

TEST(Aperture, ConstantHasZeroGradients)
{
    const FractureFrame f = FractureFrame::unit_square_vertical();
    const ApertureSample s = eval_aperture_at(ApertureProfile::constant(0.03, 0.02), f, 0.4);
    EXPECT_EQ(s.grad_d1, Vec2::Zero());
    EXPECT_EQ(s.grad_d2, Vec2::Zero());
    EXPECT_DOUBLE_EQ(s.d, 0.05);
}

TEST(Aperture, NegativeSideAllowed)
{
    const FractureFrame f = FractureFrame::unit_square_vertical();
    const ApertureSample s = eval_aperture_at(ApertureProfile::constant(-0.01, 0.03), f, 0.5);
    EXPECT_DOUBLE_EQ(s.d1, -0.01);
    EXPECT_NEAR(s.d, 0.02, 1e-16);
}

TEST(Aperture, RejectsOutsideRangeAndClosedAperture)
{
    const FractureFrame f = FractureFrame::unit_square_vertical();
    const ApertureProfile prof = serpentine(0.1);
    EXPECT_THROW(eval_aperture_at(prof, f, 1.5), GeometryError);
    EXPECT_THROW(eval_aperture_at(prof, f, -0.01), GeometryError);
    EXPECT_THROW(eval_aperture(prof, f, Vec2(0.6, 0.5)), GeometryError);
    ApertureProfile tight = serpentine(0.1);
    tight.set_d_min(0.25);
    EXPECT_THROW(eval_aperture_at(tight, f, 0.5), GeometryError);
    EXPECT_THROW(ApertureProfile::constant(0.1, -0.1), GeometryError);
    const ApertureProfile closing =
        ApertureProfile::custom([](double t) { return 0.5 - t; }, [](double) { return 0.0; },
                                [](double) { return -1.0; }, [](double) { return 0.0; });
    EXPECT_NO_THROW(eval_aperture_at(closing, f, 0.4));
    EXPECT_THROW(eval_aperture_at(closing, f, 0.6), GeometryError);
}

TEST(Aperture, GradientsMatchFiniteDifferences)
{
    const FractureFrame f = FractureFrame::unit_square_vertical();
    SinusoidalParams shifted;
    shifted.d0 = 0.05;
    shifted.phase = 0.7;
    shifted.frequency = 3.0;
    const std::vector<ApertureProfile> profiles{serpentine(0.1), symmetric_profile(0.01),
                                                ApertureProfile::sinusoidal(shifted)};
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(1e-3, 1.0 - 1e-3);
    const double step = 1e-6;
    for (const ApertureProfile& p : profiles) {
        for (int i = 0; i < 100; ++i) {
            const double t = u(rng);
            const double fd1 = (p.d1(t + step) - p.d1(t - step)) / (2.0 * step);
            const double fd2 = (p.d2(t + step) - p.d2(t - step)) / (2.0 * step);
            const ApertureSample s = eval_aperture_at(p, f, t);
            EXPECT_NEAR(s.grad_d1.y(), fd1, 1e-6 * std::max(1.0, std::abs(fd1)));
            EXPECT_NEAR(s.grad_d2.y(), fd2, 1e-6 * std::max(1.0, std::abs(fd2)));
            EXPECT_DOUBLE_EQ(s.grad_d1.x(), 0.0);
            EXPECT_DOUBLE_EQ(s.grad_d2.x(), 0.0);
        }
    }
}

TEST(Normals, FlatSidesGiveFrameNormal)
{
    const FractureFrame f = FractureFrame::unit_square_vertical();
    const auto [n1, n2] = interface_normals(ApertureProfile::constant(0.1, 0.2), f, 0.3);
    EXPECT_EQ(n1, Vec2(-1.0, 0.0));
    EXPECT_EQ(n2, Vec2(1.0, 0.0));
}

TEST(Normals, SerpentineAtOrigin)
{
    const FractureFrame f = FractureFrame::unit_square_vertical();
    const auto [n1, n2] = interface_normals(serpentine(0.1), f, 0.0);
    // d1' = 0.05 * 8 pi, d2' = -0.05 * 8 pi at t = 0.
    const double g = 0.4 * pi;
    const double s = std::sqrt(1.0 + g * g);
    EXPECT_NEAR(n1.x(), -1.0 / s, 1e-14);
    EXPECT_NEAR(n1.y(), -g / s, 1e-14);
    EXPECT_NEAR(n2.x(), 1.0 / s, 1e-14);
    EXPECT_NEAR(n2.y(), g / s, 1e-14);
}

TEST(Normals, UnitLengthEverywhere)
{
    const FractureFrame f = FractureFrame::unit_square_vertical();
    for (const ApertureProfile& p : {serpentine(0.1), symmetric_profile(0.1), serpentine(0.001)}) {
        for (int i = 0; i <= 200; ++i) {
            const auto [n1, n2] = interface_normals(p, f, i / 200.0);
            EXPECT_NEAR(n1.norm(), 1.0, 1e-12);
            EXPECT_NEAR(n2.norm(), 1.0, 1e-12);
        }
    }
}

TEST(JumpAverage, ScalarTraces)
{
    const FractureFrame f = FractureFrame::unit_square_vertical();
    const ApertureSample a = eval_aperture_at(serpentine(0.1), f, 0.2);
    const std::vector<double> t1{1.0}, t2{3.0};
    const JumpAverage ja = continuous_jump_avg(t1, t2, a, f, TraceKind::scalar);
    EXPECT_DOUBLE_EQ(ja.jump, 2.0);
    EXPECT_DOUBLE_EQ(ja.average, 2.0);
    const std::vector<double> same{0.7};
    EXPECT_DOUBLE_EQ(continuous_jump_avg(same, same, a, f, TraceKind::scalar).jump, 0.0);
}

TEST(JumpAverage, FluxTracesFlatAperture)
{
    const FractureFrame f = FractureFrame::unit_square_vertical();
    const ApertureSample a = eval_aperture_at(ApertureProfile::constant(0.1, 0.1), f, 0.5);
    const std::vector<double> n{1.0, 0.0};
    const JumpAverage ja = continuous_jump_avg(n, n, a, f, TraceKind::vector);
    EXPECT_DOUBLE_EQ(ja.jump, 0.0);
    EXPECT_DOUBLE_EQ(ja.average, 1.0);
    // Classical operators: jump = n.F1 - n.F2, average = n.{F}.
    const Vec2 f1(0.3, -2.0), f2(-0.4, 5.0);
    const JumpAverage c = flux_jump_avg(f1, f2, a, f);
    EXPECT_DOUBLE_EQ(c.jump, 0.3 + 0.4);
    EXPECT_DOUBLE_EQ(c.average, 0.5 * (0.3 - 0.4));
}

TEST(JumpAverage, FluxTracesOppositeGradients)
{
    // grad d1 = -grad d2 = g: F.(n + g) - F.(n + g) = 0 and avg = F.(n + g).
    const FractureFrame f = FractureFrame::unit_square_vertical();
    const ApertureSample a = eval_aperture_at(symmetric_profile(0.1), f, 0.3);
    ASSERT_NE(a.grad_d1.y(), 0.0);
    ApertureSample opposite = a;
    opposite.grad_d2 = -a.grad_d1;
    const Vec2 F(1.0, 0.5);
    const JumpAverage ja = flux_jump_avg(F, F, opposite, f);
    EXPECT_NEAR(ja.jump, 0.0, 1e-15);
    EXPECT_NEAR(ja.average, 1.0 + 0.5 * a.grad_d1.y(), 1e-15);
}

TEST(JumpAverage, RejectsMismatchedTraceSizes)
{
    const FractureFrame f = FractureFrame::unit_square_vertical();
    const ApertureSample a = eval_aperture_at(serpentine(0.1), f, 0.2);
    const std::vector<double> one{1.0}, two{1.0, 2.0};
    EXPECT_THROW(continuous_jump_avg(two, two, a, f, TraceKind::scalar), GeometryError);
    EXPECT_THROW(continuous_jump_avg(one, one, a, f, TraceKind::vector), GeometryError);
    EXPECT_THROW(continuous_jump_avg(one, two, a, f, TraceKind::scalar), GeometryError);
}

TEST(Permeability, BetaAndXiValidation)
{
    PermeabilityData k = PermeabilityData::isotropic(1.0, 0.5, 2.0 / 3.0);
    EXPECT_NEAR(k.beta(0.3, 0.2), 4.0 * 0.5 / ((4.0 / 3.0 - 1.0) * 0.2), 1e-12);
    k.xi = 0.5;
    EXPECT_THROW(k.validate(), GeometryError);
    Mat2 bad;
    bad << 1.0, 0.5, 0.2, 1.0;
    EXPECT_THROW(check_spd(bad, "test"), GeometryError);
    EXPECT_THROW(check_spd(-Mat2::Identity(), "test"), GeometryError);
    EXPECT_NO_THROW(check_spd(2.0 * Mat2::Identity(), "test"));
}

TEST(Wellposedness, ConstantApertureIsZero)
{
    const FractureFrame f = FractureFrame::unit_square_vertical();
    const WellposednessDiagnostic d =
        check_wellposedness(ApertureProfile::constant(0.05, 0.05), f, PermeabilityData::isotropic(1.0, 0.5));
    EXPECT_EQ(d.lhs, 0.0);
    EXPECT_TRUE(d.satisfied);
}

TEST(Wellposedness, SerpentineValue)
{
    // d = 2 d0 is constant and |d1' - d2'| peaks at d0 * 8 pi.
    const FractureFrame f = FractureFrame::unit_square_vertical();
    const WellposednessDiagnostic d =
        check_wellposedness(serpentine(0.1), f, PermeabilityData::isotropic(1.0, 0.5));
    const double expected = std::pow(0.1 * 8.0 * pi, 2);
    EXPECT_NEAR(d.lhs, expected, 1e-9 * expected);
    EXPECT_TRUE(d.satisfied);
    EXPECT_FALSE(check_wellposedness(serpentine(0.2), f, PermeabilityData::isotropic(1.0, 0.5)).satisfied);
}

TEST(Wellposedness, ContrastQuadruplesLhs)
{
    const FractureFrame f = FractureFrame::unit_square_vertical();
    PermeabilityData k = PermeabilityData::isotropic(1.0, 1.0);
    const double base = check_wellposedness(symmetric_profile(0.05), f, k).lhs;
    k.k_perp = [](double) { return 2.0; };
    const double doubled = check_wellposedness(symmetric_profile(0.05), f, k).lhs;
    EXPECT_NEAR(doubled, 4.0 * base, 1e-12 * doubled);
}

TEST(Wellposedness, MonotoneInApertureRatio)
{
    // Same gradient sup norm, growing D / d_min.
    const FractureFrame f = FractureFrame::unit_square_vertical();
    const PermeabilityData k = PermeabilityData::isotropic(1.0, 1.0);
    double last = 0.0;
    for (double offset : {0.5, 0.2, 0.1, 0.06}) {
        const ApertureProfile p = ApertureProfile::custom(
            [offset](double t) { return offset + 0.05 * std::sin(2.0 * pi * t); }, [](double) { return 0.0; },
            [](double t) { return 0.1 * pi * std::cos(2.0 * pi * t); }, [](double) { return 0.0; });
        const double lhs = check_wellposedness(p, f, k).lhs;
        EXPECT_GT(lhs, last);
        last = lhs;
    }
}

TEST(Wellposedness, RejectsNonFiniteSamples)
{
    const FractureFrame f = FractureFrame::unit_square_vertical();
    const ApertureProfile p =
        ApertureProfile::custom([](double t) { return t < 0.5 ? 0.1 : std::nan(""); }, [](double) { return 0.1; },
                                [](double) { return 0.0; }, [](double) { return 0.0; });
    EXPECT_THROW(check_wellposedness(p, f, PermeabilityData::isotropic(1.0, 1.0)), GeometryError);
}
