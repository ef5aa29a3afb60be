#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <layertomo/velocity_model.hpp>

using namespace layertomo;

namespace {

VelocityProfile linear_profile() {
    return VelocityProfile::from_function(1.0, [](double z) { return 1 + z; }, [](double) { return 1.0; }, 201);
}

VelocityProfile sine_dip() {
    const double pi = std::numbers::pi;
    return VelocityProfile::from_function(
        1.0, [pi](double z) { return 2 - std::sin(pi * z); }, [pi](double z) { return -pi * std::cos(pi * z); },
        4001);
}

// Plain bisection, independent of the library's root finder.
template <class F>
double bisect(F f, double a, double b) {
    double fa = f(a);
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + b), fm = f(m);
        if ((fm > 0) == (fa > 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST(EvalSpeed, ConstantProfile) {
    const auto p = VelocityProfile::constant(2.0, 3.0);
    EXPECT_EQ(eval_speed(p, 1.5), 2.0);
}

TEST(EvalSpeed, LinearDataMidpoint) {
    const auto p = VelocityProfile::from_samples({0.0, 1.0}, {1.0, 3.0}, TangentRule::secant);
    EXPECT_DOUBLE_EQ(eval_speed(p, 0.5), 2.0);
}

TEST(EvalSpeed, DenseQuadraticWithinTolerance) {
    const auto p = VelocityProfile::from_function(1.0, [](double z) { return 1 + z * z; },
                                                  [](double z) { return 2 * z; }, 1001);
    EXPECT_NEAR(eval_speed(p, 0.3), 1.09, 1e-10);
}

TEST(EvalSpeed, ExactAtKnotsAndOutsideThrows) {
    const auto p = VelocityProfile::from_samples({0.0, 0.4, 1.0}, {1.0, 1.7, 1.2});
    EXPECT_EQ(eval_speed(p, 0.4), 1.7);
    EXPECT_THROW(eval_speed(p, 1.01), DomainError);
    EXPECT_THROW(eval_speed(p, -0.01), DomainError);
}

TEST(EvalSpeed, ValuesStayWithinKnotRange) {
    const auto p = VelocityProfile::from_samples({0.0, 0.1, 0.2, 0.5, 0.6, 1.0}, {1.0, 1.0, 3.0, 3.1, 1.2, 1.1});
    for (int i = 0; i <= 1000; ++i) {
        const double c = p.speed(i / 1000.0);
        EXPECT_GE(c, 1.0);
        EXPECT_LE(c, 3.1);
    }
}

TEST(EvalSpeed, DerivativeContinuousAcrossKnots) {
    const auto p = VelocityProfile::from_samples({0.0, 0.3, 0.5, 1.0}, {1.0, 1.5, 1.6, 2.5});
    for (double z : {0.3, 0.5}) EXPECT_NEAR(p.slope(z - 1e-12), p.slope(z + 1e-12), 1e-9);
}

TEST(EvalSpeed, InvalidDataReportsFirstViolation) {
    EXPECT_THROW(VelocityProfile::from_samples({0.0, 0.5, 0.4}, {1.0, 1.0, 1.0}), InvariantViolation);
    EXPECT_THROW(VelocityProfile::from_samples({0.0, 1.0}, {1.0, -1.0}), InvariantViolation);
    auto v = VelocityProfile::first_violation({0.0, 0.5, 0.5, 0.2}, {1.0, 0.0, 1.0, 1.0});
    ASSERT_TRUE(v);
    EXPECT_NE(v->find("knot 1"), std::string::npos);
}

TEST(SlownessExtrema, Examples) {
    auto e = slowness_extrema(VelocityProfile::constant(2.0, 1.0));
    EXPECT_EQ(e.lower, 0.5);
    EXPECT_EQ(e.upper, 0.5);
    e = slowness_extrema(linear_profile());
    EXPECT_DOUBLE_EQ(e.lower, 0.5);
    EXPECT_DOUBLE_EQ(e.upper, 1.0);
    e = slowness_extrema(sine_dip());
    EXPECT_NEAR(e.lower, 0.5, 1e-12);
    EXPECT_NEAR(e.upper, 1.0, 1e-12);
}

TEST(TurningDepth, Examples) {
    EXPECT_NEAR(*turning_depth(linear_profile(), 1 / 1.5), 0.5, 1e-12);
    EXPECT_FALSE(turning_depth(VelocityProfile::constant(2.0, 1.0), 1.0));
    const auto quad = VelocityProfile::from_function(1.0, [](double z) { return 1 + z * z; },
                                                     [](double z) { return 2 * z; }, 401);
    const double oracle = bisect([](double z) { return 1 + z * z - 1.25; }, 0.0, 1.0);
    EXPECT_NEAR(*turning_depth(quad, 1 / 1.25), oracle, 1e-12);
}

TEST(TurningDepth, SmallestRootIsReturned) {
    const auto bump = VelocityProfile::from_samples({0.0, 0.3, 0.6, 1.0}, {1.0, 2.0, 1.2, 3.0});
    const double z = *turning_depth(bump, 1 / 1.5);
    EXPECT_LT(z, 0.3);
    EXPECT_NEAR(bump.speed(z), 1.5, 1e-12);
}

TEST(Sdf, LinearSlownessUnitDensity) {
    const auto p = VelocityProfile::from_function(
        0.5, [](double z) { return 1 / (1 - z); }, [](double z) { return 1 / ((1 - z) * (1 - z)); }, 2001);
    const auto s = sdf(p, 0.0, {0.75});
    EXPECT_NEAR(s.density[0], 1.0, 1e-9);
    EXPECT_NEAR(s.cumulative[0], 0.25, 1e-12);
}

TEST(Sdf, ConstantProfileIsPointMass) {
    const auto p = VelocityProfile::constant(2.0, 1.0);
    const auto s = sdf(p, 0.0, {0.5});
    EXPECT_TRUE(s.singular[0]);
    EXPECT_EQ(s.cumulative[0], 1.0);
    const auto lin = linear_profile();
    const auto s2 = sdf(lin, 0.0, {0.5, 0.75, 1.0});
    EXPECT_NEAR(s2.cumulative[0], 0.0, 1e-12);
    EXPECT_NEAR(s2.cumulative[2], 1.0, 1e-12);
}

TEST(Sdf, TwoRootContributions) {
    const double pi = std::numbers::pi;
    const auto p = sine_dip();
    const double q = 2.0 / 3.0;
    // Roots of 2 - sin(pi z) = 1.5 are z = 1/6 and 5/6.
    double oracle = 0;
    for (double z : {1.0 / 6, 5.0 / 6}) {
        const double c = 1.5, dc = std::abs(pi * std::cos(pi * z));
        oracle += c * c / dc;
    }
    const auto s = sdf(p, 0.0, {q});
    EXPECT_NEAR(s.density[0], oracle, 1e-6);
    // {c >= 1.5} = [0, 1/6] and [5/6, 1].
    EXPECT_NEAR(s.cumulative[0], 1.0 / 3, 1e-9);
    EXPECT_THROW(sdf(p, 0.0, {0.4}), DomainError);
}

TEST(Sdf, CumulativeIsRunningIntegralOfDensity) {
    const auto p = linear_profile();
    const double a = 0.5, b = 1.0;
    std::vector<double> grid;
    for (int i = 0; i <= 400; ++i) grid.push_back(a + (b - a) * i / 400.0);
    const auto s = sdf(p, 0.0, grid);
    double acc = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        // Simpson on each cell with a midpoint density evaluation.
        const double m = 0.5 * (grid[i - 1] + grid[i]);
        const double fm = sdf_density_at(p, m, 1.0);
        acc += (grid[i] - grid[i - 1]) / 6 * (s.density[i - 1] + 4 * fm + s.density[i]);
        EXPECT_NEAR(s.cumulative[i] - s.cumulative[0], acc, 1e-8);
        EXPECT_GE(s.cumulative[i], s.cumulative[i - 1]);
    }
}

TEST(Sdf, JacobianFormReproducesDepthIncrements) {
    const auto p = linear_profile();
    // For increasing c, Z(q) = 1/q - 1, so depth increments over a q^2 grid follow from F.
    for (double q2 = 0.3; q2 < 0.95; q2 += 0.05) {
        const double dq2 = 1e-4, q = std::sqrt(q2 + dq2 / 2);
        const double f = sdf_density_at(p, q, 1.0);
        const double jac = f / (2 * q);
        const double dz = 1 / std::sqrt(q2) - 1 / std::sqrt(q2 + dq2);
        EXPECT_NEAR(jac * dq2, dz, 1e-6 * dz + 1e-12);
    }
}

TEST(Rearrange, IdentityLeavesProfileUnchanged) {
    const auto p = sine_dip();
    const auto r = rearrange_profile(p, {{0.0, 0.4, 1.0}, {0, 1}});
    ASSERT_EQ(r.knots().size(), p.knots().size());
    for (std::size_t i = 0; i < p.knots().size(); ++i) EXPECT_NEAR(r.speeds()[i], p.speeds()[i], 1e-14);
}

TEST(Rearrange, SymmetricBumpSwapIsIdentical) {
    const double pi = std::numbers::pi;
    const auto p = VelocityProfile::from_function(
        1.0, [pi](double z) { return 1 + 0.5 * std::pow(std::sin(2 * pi * z), 2); },
        [pi](double z) { return 2 * pi * std::sin(2 * pi * z) * std::cos(2 * pi * z); }, 2001);
    const auto r = rearrange_profile(p, {{0.0, 0.5, 1.0}, {1, 0}});
    for (int i = 0; i <= 200; ++i) EXPECT_NEAR(r.speed(i / 200.0), p.speed(i / 200.0), 1e-9);
}

TEST(Rearrange, UnequalMonotoneBlocksShareCumulativeSdf) {
    const auto p = linear_profile();
    const auto r = rearrange_profile(p, {{0.0, 0.3, 1.0}, {1, 0}}, 0.01);
    double sup_c = 0;
    for (int i = 0; i <= 100; ++i) sup_c = std::max(sup_c, std::abs(r.speed(i / 100.0) - p.speed(i / 100.0)));
    EXPECT_GT(sup_c, 0.2);
    // Blending trims the extreme speeds slightly, so compare on the common slowness range.
    const auto e1 = slowness_extrema(p), e2 = slowness_extrema(r);
    const double lo = std::max(e1.lower, e2.lower), hi = std::min(e1.upper, e2.upper);
    std::vector<double> grid;
    for (int i = 0; i <= 500; ++i) grid.push_back(lo + (hi - lo) * i / 500.0);
    const auto g1 = sdf(p, 0.0, grid), g2 = sdf(r, 0.0, grid);
    double sup_g = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        sup_g = std::max(sup_g, std::abs(g1.cumulative[i] - g2.cumulative[i]));
    EXPECT_LT(sup_g, 0.01);
}

TEST(Rearrange, PreservesMomentsOfSmoothJunctionSwap) {
    const double pi = std::numbers::pi;
    const auto p = VelocityProfile::from_function(
        1.0, [pi](double z) { return 1 + 0.5 * std::pow(std::sin(pi * z), 2); },
        [pi](double z) { return pi * std::sin(pi * z) * std::cos(pi * z); }, 2001);
    const auto r = rearrange_profile(p, {{0.0, 0.3, 1.0}, {1, 0}});
    auto moment = [](const VelocityProfile& v, int m) {
        // Composite Simpson on a fine uniform grid.
        const int n = 20000;
        double acc = 0;
        for (int i = 0; i <= n; ++i) {
            const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
            acc += w * std::pow(v.speed(static_cast<double>(i) / n), m);
        }
        return acc / (3.0 * n);
    };
    for (int m = -3; m <= 9; ++m) {
        const double tol = 1e-6 * std::pow(1.5, m);
        EXPECT_NEAR(moment(r, m), moment(p, m), tol) << "m = " << m;
    }
}

TEST(Rearrange, RejectsNonPartition) {
    const auto p = linear_profile();
    EXPECT_THROW(rearrange_profile(p, {{0.1, 0.5, 1.0}, {1, 0}}), DomainError);
    EXPECT_THROW(rearrange_profile(p, {{0.0, 0.5, 0.4}, {1, 0}}), DomainError);
    EXPECT_THROW(rearrange_profile(p, {{0.0, 0.5, 1.0}, {1, 1}}), DomainError);
    EXPECT_THROW(rearrange_profile(p, {{0.0, 0.5, 1.2}, {1, 0}}), DomainError);
}
