#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <layertomo/fredholm_spectral.hpp>

using namespace layertomo;

namespace {

using R128 = MpReal<128>;
using R256 = MpReal<256>;
using R512 = MpReal<512>;

double kernel_direct(double xt, double yt, double Delta) { return 1 / std::sqrt(Delta * (xt - yt)); }

// k(y', y) in reduced coordinates: [2 log(sqrt(xt - y') + sqrt(xt - y))] between xt(rho^*) and xt(rho_*).
double log_kernel(double y1, double y2, double xt_lo, double xt_hi) {
    auto F = [&](double xt) { return 2 * std::log(std::sqrt(xt - y1) + std::sqrt(xt - y2)); };
    return F(xt_hi) - F(xt_lo);
}

}  // namespace

TEST(KernelExpansion, GeometricSeriesAtEndpoint) {
    const double xt = 1.7, rho = elliptical_radius(xt);
    const double limit = std::sqrt(2.0) * std::sqrt(rho) / (1 - rho);
    double prev = INFINITY;
    for (std::size_t n : {5u, 10u, 20u, 40u}) {
        const double err = std::abs(legendre_kernel_expansion(xt, 1.0, n).value - limit);
        EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_NEAR(legendre_kernel_expansion(xt, 1.0, 80).value, limit, 1e-13);
}

TEST(KernelExpansion, GenericPointAndTailRatio) {
    const double xt = 1.25, yt = 0.3;
    EXPECT_NEAR(legendre_kernel_expansion(xt, yt, 60).value, kernel_direct(xt, yt, 1), 1e-12);
    EXPECT_NEAR(legendre_kernel_expansion(xt, yt, 60, 2.5).value, kernel_direct(xt, yt, 2.5), 1e-12);
    // Tails at n and 2n differ by about rho^n up to the oscillation of P_k.
    const double rho = 0.5;
    const double t10 = std::abs(legendre_kernel_expansion(xt, 1.0, 10).value - kernel_direct(xt, 1.0, 1));
    const double t20 = std::abs(legendre_kernel_expansion(xt, 1.0, 20).value - kernel_direct(xt, 1.0, 1));
    EXPECT_NEAR(t20 / t10, std::pow(rho, 10), 1e-12);
}

TEST(KernelExpansion, Flags) {
    EXPECT_TRUE(legendre_kernel_expansion(1.0, 0.2, 10).slow_convergence);
    EXPECT_FALSE(legendre_kernel_expansion(1.1, 0.2, 10).slow_convergence);
    EXPECT_THROW(legendre_kernel_expansion(0.9, 0.2, 10), DomainError);
    EXPECT_THROW(legendre_kernel_expansion(1.2, 1.5, 10), DomainError);
}

TEST(HankelMoment, ClosedForms) {
    SlownessGeometry empty;
    empty.rho_lower = empty.rho_upper = 0.7;
    EXPECT_EQ(hankel_moment<double>(0, empty), 0.0);
    EXPECT_EQ(hankel_moment<double>(5, empty), 0.0);
    EXPECT_NEAR(hankel_moment<double>(1, geometry_from_rho(0.0, 1.0)), 2.0 / 3, 4e-16);
    const double m0 = hankel_moment<double>(0, geometry_from_rho(0.0, 0.5));
    EXPECT_NEAR(m0, std::log(0.5 / kRhoLowerFloor) - 0.125, 1e-12);
}

TEST(HankelMoment, QuadratureOracle128) {
    const auto g = geometry_from_rho(0.2, 0.9);
    const R128 exact = hankel_moment<R128>(7, g);
    auto f = [](const R128& r) { return pow(r, 7) * (1 / r - r); };
    const R128 quad = boost::math::quadrature::gauss_kronrod<R128, 61>::integrate(f, R128(0.2), R128(0.9));
    EXPECT_LT(static_cast<double>(abs(exact - quad)), 1e-25);
}

TEST(HankelSection, SmallOrders) {
    SlownessGeometry g = geometry_from_rho(0.2, 0.9);
    g.Delta = 1.7;
    const auto s1 = build_hankel_section<double>(1, g);
    EXPECT_NEAR(s1.K(0, 0), 1.7 * 2 * hankel_moment<double>(0, g), 1e-14);
    const auto s = build_hankel_section<double>(6, g);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
            EXPECT_EQ(s.K(i, j), s.K(j, i));
            EXPECT_GT(s.K(i, j), 0.0);
        }
    EXPECT_THROW(build_hankel_section<double>(0, g), DomainError);
}

// K_{mn} = Delta sqrt((m+1/2)(n+1/2)) int int P_m(y') k(y', y) P_n(y) dy' dy in reduced coordinates.
TEST(HankelSection, DoubleIntegralOracle) {
    const auto g = geometry_from_rho(0.2, 0.9);
    const double xt_lo = (0.9 + 1 / 0.9) / 2, xt_hi = (0.2 + 1 / 0.2) / 2;
    const auto s = build_hankel_section<double>(3, g);
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    for (int m = 0; m < 3; ++m)
        for (int n = 0; n <= m; ++n) {
            auto outer = [&](double y1) {
                auto inner = [&](double y2) {
                    return legendre<double>(m, y1) * log_kernel(y1, y2, xt_lo, xt_hi) * legendre<double>(n, y2);
                };
                return GK::integrate(inner, -1.0, 1.0, 15, 1e-13);
            };
            const double val = std::sqrt((m + 0.5) * (n + 0.5)) * GK::integrate(outer, -1.0, 1.0, 15, 1e-12);
            EXPECT_NEAR(s.K(m, n), val, 1e-8) << m << "," << n;
        }
}

TEST(HankelSection, PositiveDefiniteAtWorkingPrecision) {
    const auto g = geometry_from_rho(0.3, 0.8);
    const auto s = build_hankel_section<R256>(20, g);
    EXPECT_NO_THROW(cholesky(s.K));
    const auto e = jacobi_eigen(s.K);
    for (const auto& v : e.values) EXPECT_GT(v, 0);
}

TEST(HankelSection, FrobeniusTailBound) {
    const auto g = geometry_from_rho(0.1, 0.7);
    const std::size_t big = 24;
    const auto s = build_hankel_section<R256>(big, g);
    for (std::size_t N = 1; N < 16; ++N) {
        const auto tail = s.K.block(N, N, big - N, big - N);
        R256 fro = 0;
        for (std::size_t i = 0; i < tail.rows(); ++i)
            for (std::size_t j = 0; j < tail.cols(); ++j) fro += tail(i, j) * tail(i, j);
        EXPECT_LE(jacobi_eigen(tail).values.front(), sqrt(fro)) << N;
    }
}

TEST(EigenDecay, InterlacingAcrossSections) {
    const auto g = geometry_from_rho(0.2, 0.9);
    const auto rep = eigen_decay<R256>(g, 16);
    const double tol = std::ldexp(1.0, -static_cast<int>(rep.bits) + 10);
    for (std::size_t N = 1; N < 16; ++N) {
        const auto& a = rep.eigenvalues[N - 1];
        const auto& b = rep.eigenvalues[N];
        for (std::size_t j = 0; j < N; ++j) {
            EXPECT_LE(a[j], b[j] * (1 + tol) + tol * b[0]) << N << "," << j;
            EXPECT_LE(b[j + 1], a[j] * (1 + tol) + tol * b[0]) << N << "," << j;
        }
        EXPECT_NEAR(rep.kappa[N], std::sqrt(b.front() / b.back()), 1e-12 * rep.kappa[N]);
    }
}

TEST(EigenDecay, ThreadCountDoesNotChangeResults) {
    const auto g = geometry_from_rho(0.0, 0.5);
    const auto a = eigen_decay<R256>(g, 14, EigenDecayOptions{1});
    const auto b = eigen_decay<R256>(g, 14, EigenDecayOptions{4});
    EXPECT_EQ(a.eigenvalues, b.eigenvalues);
    EXPECT_EQ(a.lambda_min_decimal, b.lambda_min_decimal);
}

TEST(EigenDecay, PrecisionExhaustion) {
    const auto g = geometry_from_rho(0.0, 0.5);
    try {
        eigen_decay<double>(g, 30);
        FAIL() << "expected precision exhaustion";
    } catch (const PrecisionExhausted& e) {
        EXPECT_LT(e.last_trustworthy, 30u);
        EXPECT_GT(e.last_trustworthy, 3u);
    }
    EXPECT_NO_THROW(eigen_decay(g, 30, 512u));
}

TEST(EigenDecay, GeometricRateNearUpperBound) {
    const auto g = geometry_from_rho(0.0, 0.5);
    const auto rep = eigen_decay<R256>(g, 20);
    const auto fit = rep.fit_log_lambda_vs_n(8, 20);
    EXPECT_NEAR(-fit.slope / (2 * std::log(g.beta)), 1.0, 0.1);
}

TEST(BoundCurves, AlignmentAndDegenerateAlpha) {
    const auto g = geometry_from_rho(0.5, 1.0);
    const auto b = bound_curves(g, 50, 1.0, 1.2465);
    EXPECT_DOUBLE_EQ(b.lower1[0], 1.0);
    EXPECT_DOUBLE_EQ(b.lower2[0], 1.0);
    EXPECT_DOUBLE_EQ(b.upper[0], 1.0);
    EXPECT_DOUBLE_EQ(b.szego[0], 1.0);
    for (std::size_t N = 1; N <= 10; ++N) EXPECT_NEAR(b.lower1[N - 1], static_cast<double>(N), 1e-12 * N);
    EXPECT_GT(b.lower2[49], b.lower1[49]);
    EXPECT_NEAR(b.upper[1] / b.upper[0], std::pow(2.0, 0.25) * g.beta, 1e-12);
}

TEST(LinearFitHelper, ExactLine) {
    const auto f = linear_fit({1, 2, 3, 4}, {1, 3, 5, 7});
    EXPECT_NEAR(f.slope, 2.0, 1e-15);
    EXPECT_NEAR(f.intercept, -1.0, 1e-14);
    EXPECT_NEAR(f.r2, 1.0, 1e-15);
    EXPECT_THROW(linear_fit({1}, {1}), DomainError);
}

TEST(OrthoPoly, NormalizationAndGram) {
    const auto g = geometry_from_rho(0.3, 0.9);
    const auto op = orthopoly_mu<R256>(g, 12);
    EXPECT_LT(static_cast<double>(abs(op.coeffs[0][0] - 1 / sqrt(hankel_moment<R256>(0, g)))), 1e-70);
    const auto rule = gauss_legendre<R256>(80, R256(0.3), R256(0.9));
    for (std::size_t m = 0; m < 12; ++m)
        for (std::size_t n = 0; n <= m; ++n) {
            R256 acc = 0;
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                const R256& r = rule.nodes[q];
                acc += rule.weights[q] * (1 / r - r) * op(m, r) * op(n, r);
            }
            EXPECT_LT(static_cast<double>(abs(acc - (m == n ? 1 : 0))), 1e-20) << m << "," << n;
        }
}

TEST(OrthoPoly, RecurrenceLimits) {
    const auto g = geometry_from_rho(0.3, 0.9);
    const auto op = orthopoly_mu<R512>(g, 41);
    const double a_lim = 0.6, b_lim = 0.15;
    const double ea10 = std::abs(static_cast<double>(op.a[10]) - a_lim);
    const double ea40 = std::abs(static_cast<double>(op.a[40]) - a_lim);
    const double eb10 = std::abs(static_cast<double>(op.b[10]) - b_lim);
    const double eb40 = std::abs(static_cast<double>(op.b[40]) - b_lim);
    EXPECT_LT(ea40, ea10);
    EXPECT_LT(eb40, eb10);
    EXPECT_LT(ea40, 1e-3);
    EXPECT_LT(eb40, 1e-3);
}

TEST(OrthoPoly, DoublePrecisionRunsOut) {
    const auto g = geometry_from_rho(0.3, 0.9);
    EXPECT_THROW(orthopoly_mu<double>(g, 60), PrecisionExhausted);
}

TEST(Aitken, InverseSimilarity) {
    const auto g = geometry_from_rho(0.3, 0.8);
    EXPECT_LT(aitken_inverse_check<double>(g, 1), 1e-15);
    EXPECT_LT(aitken_inverse_check<R256>(g, 2), 1e-15);
    EXPECT_LT(aitken_inverse_check<R512>(g, 8), 1e-10);
    EXPECT_THROW(aitken_inverse_check<double>(g, 30), NumericalError);
}

TEST(Szego, RatioConvergence) {
    const auto g = geometry_from_rho(0.3, 0.9);
    const auto s = szego_determinant_ratio<MpReal<1024>>(g, 25);
    ASSERT_FALSE(s.truncated);
    ASSERT_EQ(s.ratio.size(), 26u);
    for (std::size_t N = 5; N + 1 <= 25; ++N) EXPECT_LT(s.diffs[N], s.diffs[N - 1]) << N;
    EXPECT_NEAR(s.ratio[25] / szego_limit(g), 1.0, 0.05);
}

TEST(Szego, MeasureScaling) {
    const auto g = geometry_from_rho(0.3, 0.9);
    const auto a = szego_determinant_ratio<R256>(g, 10);
    const auto b = szego_determinant_ratio<R256>(g, 10, 3.0);
    for (std::size_t N = 0; N <= 10; ++N) EXPECT_NEAR(b.ratio[N], 3 * a.ratio[N], 1e-12 * a.ratio[N]);
}

TEST(Szego, TruncatesInDouble) {
    const auto g = geometry_from_rho(0.3, 0.9);
    const auto s = szego_determinant_ratio<double>(g, 30);
    EXPECT_TRUE(s.truncated);
    EXPECT_LT(s.ratio.size(), 31u);
}
