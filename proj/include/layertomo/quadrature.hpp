#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"

namespace layertomo {

struct QuadratureOptions {
    double rel_tol = 1e-10;
    unsigned max_depth = 18;
};

// Adaptive Gauss-Kronrod (15 points) applied separately on each segment between
// consecutive breakpoints. Breakpoints outside [a,b] are ignored.
template <class F>
double integrate(F&& f, double a, double b, const std::vector<double>& breaks = {},
                 QuadratureOptions opt = {}, double* error_estimate = nullptr) {
    if (a == b) return 0.0;
    const bool flip = b < a;
    if (flip) std::swap(a, b);
    std::vector<double> pts{a};
    for (double x : breaks)
        if (x > a && x < b) pts.push_back(x);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double total = 0, err_total = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        // Boost's error floor does not scale with segment width, so a short segment at a tight
        // tolerance would refine to max_depth. Integrating over [0,1] keeps the floor relative.
        const double lo = pts[i], w = pts[i + 1] - pts[i];
        auto unit = [&](double t) { return w * f(lo + w * t); };
        double err = 0, l1 = 0;
        total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            unit, 0.0, 1.0, opt.max_depth, opt.rel_tol, &err, &l1);
        err_total += err;
    }
    if (error_estimate) *error_estimate = err_total;
    return flip ? -total : total;
}

template <class Real>
struct GaussRule {
    std::vector<Real> nodes;
    std::vector<Real> weights;
};

// Gauss-Legendre on [-1,1]; Newton iteration in Real started from a double estimate.
template <class Real>
GaussRule<Real> gauss_legendre(std::size_t n) {
    using std::abs;
    if (n == 0) throw DomainError("gauss_legendre: need at least one node");
    GaussRule<Real> r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const Real eps = std::numeric_limits<Real>::epsilon();
    const double pi = boost::math::constants::pi<double>();
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        Real x = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        Real p0, p1, dp;
        for (int it = 0; it < 100; ++it) {
            p0 = 1;
            p1 = x;
            for (std::size_t k = 1; k < n; ++k) {
                Real p2 = (Real(2 * k + 1) * x * p1 - Real(k) * p0) / Real(k + 1);
                p0 = p1;
                p1 = p2;
            }
            dp = Real(n) * (x * p1 - p0) / (x * x - 1);
            Real dx = p1 / dp;
            x -= dx;
            if (abs(dx) <= 4 * eps) break;
        }
        p0 = 1;
        p1 = x;
        for (std::size_t k = 1; k < n; ++k) {
            Real p2 = (Real(2 * k + 1) * x * p1 - Real(k) * p0) / Real(k + 1);
            p0 = p1;
            p1 = p2;
        }
        dp = Real(n) * (x * p1 - p0) / (x * x - 1);
        const Real w = 2 / ((1 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0;
    return r;
}

template <class Real>
GaussRule<Real> gauss_legendre(std::size_t n, const Real& a, const Real& b) {
    auto r = gauss_legendre<Real>(n);
    const Real mid = (a + b) / 2, half = (b - a) / 2;
    for (std::size_t i = 0; i < n; ++i) {
        r.nodes[i] = mid + half * r.nodes[i];
        r.weights[i] *= half;
    }
    return r;
}

}  // namespace layertomo
