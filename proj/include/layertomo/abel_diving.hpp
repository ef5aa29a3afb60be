#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>

#include "errors.hpp"
#include "linalg.hpp"
#include "pchip.hpp"
#include "polynomials.hpp"
#include "quadrature.hpp"
#include "velocity_model.hpp"

namespace layertomo {

// g(x) = int_x^end f(y) / sqrt(y - x) dy with y = x + u^2.
template <class F>
double abel_forward(F&& f, double x, double support_end, const std::vector<double>& breaks = {},
                    double rel_tol = 1e-10) {
    if (!(x < support_end)) return 0.0;
    std::vector<double> ub;
    for (double y : breaks)
        if (y > x && y < support_end) ub.push_back(std::sqrt(y - x));
    auto g = [&](double u) { return 2 * f(x + u * u); };
    return integrate(g, 0.0, std::sqrt(support_end - x), ub, {rel_tol});
}

// int_{x0}^{y0} dz / sqrt((z - x0)(y0 - z)) with z = mid + r sin(theta); the two distances are
// r (1 + sin) and r (1 - sin), formed without subtracting nearby numbers.
inline double abel_square_kernel_check(double x0, double y0) {
    if (!(x0 < y0)) throw DomainError("abel_square_kernel_check: need x0 < y0");
    const double r = 0.5 * (y0 - x0);
    const double half_pi = boost::math::constants::half_pi<double>();
    auto f = [&](double t) {
        const double lo = std::sin(half_pi / 2 + t / 2), hi = std::sin(half_pi / 2 - t / 2);
        const double prod = (2 * r * lo * lo) * (2 * r * hi * hi);
        if (!(prod > 0)) return 1.0;
        return r * std::cos(t) / std::sqrt(prod);
    };
    return integrate(f, -half_pi, half_pi, {}, {1e-13});
}

// Singular triple of the Abel operator on [-1,1]:
// A v_n = sigma_n u_n with u_n = sqrt(1-x) U_n, v_n = sqrt((n+1)/2) P_n^{(0,1)}.
struct SingularTriple {
    std::size_t n = 0;
    double sigma = 0;

    double left(double x) const { return std::sqrt(1 - x) * chebyshev_u_all(n, x)[n]; }
    double right(double x) const { return std::sqrt((n + 1) / 2.0) * jacobi01_all(n, x)[n]; }
};

inline std::vector<SingularTriple> js_singular_system(std::size_t n_max) {
    std::vector<SingularTriple> out;
    for (std::size_t n = 0; n <= n_max; ++n) out.push_back({n, 1 / std::sqrt((n + 1) / 2.0)});
    return out;
}

// <f,g>_r = int_{-1}^{1} (1+x) f g dx.
template <class F, class G>
double inner_right(F&& f, G&& g, std::size_t nodes = 64) {
    const auto rule = gauss_legendre<double>(nodes);
    double acc = 0;
    for (std::size_t i = 0; i < nodes; ++i) {
        const double x = rule.nodes[i];
        acc += rule.weights[i] * (1 + x) * f(x) * g(x);
    }
    return acc;
}

// <f,g>_l = (2/pi) int_{-1}^{1} sqrt((1+x)/(1-x)) f g dx, evaluated with x = cos t, which
// turns the weight into (1 + cos t) dt and leaves no endpoint singularity.
template <class F, class G>
double inner_left(F&& f, G&& g, std::size_t nodes = 64) {
    const double pi = boost::math::constants::pi<double>();
    const auto rule = gauss_legendre<double>(nodes, 0.0, pi);
    double acc = 0;
    for (std::size_t i = 0; i < nodes; ++i) {
        const double t = rule.nodes[i], x = std::cos(t);
        acc += rule.weights[i] * (1 + x) * f(x) * g(x);
    }
    return 2 / pi * acc;
}

// Singular values of the Galerkin matrix <phi_i, A psi_j>_l on [-1,1], where psi spans
// polynomials of degree < n (orthonormal under <,>_r) and phi spans sqrt(1-x) times the same
// polynomials (orthonormal under <,>_l). A psi_j uses exact Gauss quadrature in y = x + w^2.
inline std::vector<double> abel_discretized_singular_values(std::size_t n, std::size_t nodes = 0) {
    if (n == 0) throw DomainError("abel_discretized_singular_values: need a positive basis size");
    if (nodes == 0) nodes = 2 * n + 8;
    auto orthonormal_coeffs = [&](auto&& inner) {
        Matrix<double> gram(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) gram(i, j) = gram(j, i) = inner(i, j);
        return lower_triangular_inverse(cholesky(gram));
    };
    auto leg = [](std::size_t k) { return [k](double x) { return legendre(k, x); }; };
    auto sleg = [](std::size_t k) { return [k](double x) { return std::sqrt(1 - x) * legendre(k, x); }; };
    const auto R = orthonormal_coeffs([&](std::size_t i, std::size_t j) { return inner_right(leg(i), leg(j), nodes); });
    const auto L = orthonormal_coeffs([&](std::size_t i, std::size_t j) { return inner_left(sleg(i), sleg(j), nodes); });

    const auto inner_rule = gauss_legendre<double>(n + 2);
    auto abel_legendre = [&](std::size_t k, double x) {
        const double top = std::sqrt(1 - x);
        double acc = 0;
        for (std::size_t q = 0; q < inner_rule.nodes.size(); ++q) {
            const double w = 0.5 * top * (1 + inner_rule.nodes[q]);
            acc += 0.5 * top * inner_rule.weights[q] * 2 * legendre(k, x + w * w);
        }
        return acc;
    };
    // Raw matrix between Legendre-type families, then change to the orthonormal bases.
    Matrix<double> raw(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            raw(i, j) = inner_left(sleg(i), [&](double x) { return abel_legendre(j, x); }, nodes);
    const Matrix<double> B = L * raw * R.transpose();
    return singular_values(B);
}

struct HerglotzOptions {
    std::optional<double> surface_slowness;  // p0 = 1/c0 when the data omit the tau = 0 endpoint
    double rel_tol = 1e-10;
};

struct HerglotzResult {
    VelocityProfile profile;
    std::vector<double> q;        // slowness samples, descending from p0
    std::vector<double> jacobian; // |dz/dq^2| at q
    std::vector<double> depth;    // Z(q)
};

// Diving-ray inversion. tau is splined against w = sqrt(p0 - p), in which it is smooth, and the
// Abel inverse integral is taken with p = q + (p0 - q) sin^2(phi), which removes the inverse
// square roots at both p = q and p = p0:
//   |dz/dq^2|(q) = (1 / (2 pi q^2)) int_0^{pi/2} tau_w(sqrt(p0 - q) cos phi) / sqrt(p + q) dphi,
//   Z(q) = int_q^{p0} 2 s |dz/ds^2| ds.
inline HerglotzResult herglotz_invert(std::vector<double> p, std::vector<double> tau,
                                      const HerglotzOptions& opt = {}) {
    if (p.size() != tau.size()) throw DomainError("herglotz_invert: p and tau differ in length");
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i]) || !std::isfinite(tau[i]) || !(p[i] > 0))
            throw DomainError("herglotz_invert: invalid sample " + std::to_string(i));
        if (i > 0 && !(p[i] > p[i - 1]))
            throw DomainError("herglotz_invert: slownesses not strictly increasing at sample " + std::to_string(i));
    }
    if (!p.empty() && tau.back() != 0) {
        if (!opt.surface_slowness) throw DomainError("herglotz_invert: data must end at tau(p0) = 0 or give p0");
        if (!(*opt.surface_slowness > p.back())) throw DomainError("herglotz_invert: p0 must exceed all data slownesses");
        p.push_back(*opt.surface_slowness);
        tau.push_back(0.0);
    }
    if (p.size() < 4) throw DomainError("herglotz_invert: diving data degenerate (fewer than four samples)");
    for (std::size_t i = 1; i < tau.size(); ++i)
        if (!(tau[i] < tau[i - 1]))
            throw InvariantViolation("data inconsistent with monotone profile: tau not decreasing at sample " +
                                     std::to_string(i));

    const double p0 = p.back();
    const std::size_t n = p.size();
    std::vector<double> w(n), tw(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = std::sqrt(p0 - p[n - 1 - i]);
        tw[i] = tau[n - 1 - i];
    }
    const MonotoneCubic spline(w, tw, TangentRule::monotone);
    const double pi = boost::math::constants::pi<double>();

    auto jacobian = [&](double q) {
        const double r = std::sqrt(std::max(p0 - q, 0.0));
        std::vector<double> breaks;
        if (r > 0)
            for (double wk : w)
                if (wk > 0 && wk < r) breaks.push_back(std::acos(wk / r));
        auto f = [&](double phi) {
            const double s = std::sin(phi);
            const double pp = q + (p0 - q) * s * s;
            return spline.derivative(r * std::cos(phi)) / std::sqrt(pp + q);
        };
        return integrate(f, 0.0, pi / 2, breaks, {opt.rel_tol, 12}) / (2 * pi * q * q);
    };

    HerglotzResult out;
    out.q.resize(n);
    out.jacobian.resize(n);
    out.depth.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.q[i] = p[n - 1 - i];
        out.jacobian[i] = jacobian(out.q[i]);
        if (!(out.jacobian[i] > 0))
            throw InvariantViolation("data inconsistent with monotone profile: non-positive depth density at q = " +
                                     std::to_string(out.q[i]));
    }
    // The depth density is smooth between data slownesses, so a short Gauss rule per gap suffices.
    const auto gap_rule = gauss_legendre<double>(6);
    out.depth[0] = 0;
    for (std::size_t i = 1; i < n; ++i) {
        const double a = out.q[i], b = out.q[i - 1];
        double dz = 0;
        for (std::size_t k = 0; k < gap_rule.nodes.size(); ++k) {
            const double s = 0.5 * (a + b) + 0.5 * (b - a) * gap_rule.nodes[k];
            dz += 0.5 * (b - a) * gap_rule.weights[k] * 2 * s * jacobian(s);
        }
        out.depth[i] = out.depth[i - 1] + dz;
        if (!(out.depth[i] > out.depth[i - 1]))
            throw InvariantViolation("data inconsistent with monotone profile: depth not increasing");
    }
    std::vector<double> c(n), dc(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = out.q[i];
        c[i] = 1 / q;
        dc[i] = 1 / (2 * q * q * q * out.jacobian[i]);
    }
    out.profile = VelocityProfile::from_samples(out.depth, std::move(c), std::move(dc));
    return out;
}

}  // namespace layertomo
