#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "polynomials.hpp"
#include "quadrature.hpp"
#include "velocity_model.hpp"

namespace layertomo {

// (-1/2 choose n).
inline double binomial_minus_half(std::size_t n) {
    double b = 1;
    for (std::size_t k = 0; k < n; ++k) b *= (-0.5 - static_cast<double>(k)) / static_cast<double>(k + 1);
    return b;
}

struct MomentVector {
    std::size_t degree = 0;
    std::vector<double> values;  // m_n = int_0^h c^{2n-1} dz, n < degree
    double c0 = 0;
};

inline MomentVector odd_moments(const VelocityProfile& profile, std::size_t d, double rel_tol = 1e-12) {
    if (d == 0) throw DomainError("odd_moments: degree must be at least 1");
    MomentVector m;
    m.degree = d;
    m.c0 = profile.surface_speed();
    for (std::size_t n = 0; n < d; ++n) {
        const double e = 2.0 * static_cast<double>(n) - 1;
        m.values.push_back(integrate([&](double z) { return std::pow(profile.speed(z), e); }, 0.0, profile.depth(),
                                     profile.knots(), {rel_tol}));
    }
    return m;
}

namespace detail {

// Fixed Gauss rule on every knot interval of the merged knot sets: the integrand is a smooth
// function of piecewise cubics there, so the rule is accurate to rounding.
template <class F>
double piecewise_integral(const std::vector<double>& knots, F&& f, std::size_t order = 12) {
    static thread_local std::size_t cached_order = 0;
    static thread_local GaussRule<double> rule;
    if (cached_order != order) {
        rule = gauss_legendre<double>(order);
        cached_order = order;
    }
    double acc = 0;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const double a = knots[k], b = knots[k + 1], mid = (a + b) / 2, half = (b - a) / 2;
        double s = 0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
        acc += half * s;
    }
    return acc;
}

inline std::vector<double> merged_knots(const VelocityProfile& a, const VelocityProfile& b) {
    std::vector<double> k = a.knots();
    k.insert(k.end(), b.knots().begin(), b.knots().end());
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    const double h = std::min(a.depth(), b.depth());
    k.erase(std::remove_if(k.begin(), k.end(), [&](double z) { return z > h; }), k.end());
    if (k.back() < h) k.push_back(h);
    return k;
}

inline std::vector<double> exact_moments(const VelocityProfile& p, std::size_t d) {
    std::vector<double> m(d);
    for (std::size_t n = 0; n < d; ++n) {
        const double e = 2.0 * static_cast<double>(n) - 1;
        m[n] = piecewise_integral(p.knots(), [&](double z) { return std::pow(p.speed(z), e); });
    }
    return m;
}

}  // namespace detail

struct TaylorResult {
    double value = 0;
    double remainder_bound = 0;
};

// One-way vertical-window traveltime sum_{n<d} (-1/2 choose n) (-p^2)^n m_n. The coefficients
// |(-1/2 choose n)| decrease, so the tail is at most |(-1/2 choose d)| u^d / (1 - u) m_0 with u = (p max c)^2.
inline TaylorResult traveltime_taylor(const VelocityProfile& profile, double p, std::size_t d) {
    const double u = (p * profile.max_speed()) * (p * profile.max_speed());
    if (!(u < 1)) throw DomainError("traveltime_taylor: expansion invalid for p * max(c) >= 1");
    if (d == 0) throw DomainError("traveltime_taylor: degree must be at least 1");
    const auto m = odd_moments(profile, d);
    TaylorResult r;
    double pw = 1;
    for (std::size_t n = 0; n < d; ++n) {
        r.value += binomial_minus_half(n) * pw * m.values[n];
        pw *= -p * p;
    }
    r.remainder_bound = p == 0 ? 0.0 : std::abs(binomial_minus_half(d)) * std::pow(u, d) / (1 - u) * m.values[0];
    return r;
}

struct PerturbationBasis {
    std::vector<std::function<double(double)>> phi, dphi;
    std::size_t size() const { return phi.size(); }
};

// s (1 - s) P_k(2 s - 1) with s = z / h: smooth, low-wavenumber, zero at both ends.
inline PerturbationBasis bump_basis(double h, std::size_t count) {
    PerturbationBasis b;
    for (std::size_t k = 0; k < count; ++k) {
        b.phi.push_back([h, k](double z) {
            const double s = z / h;
            return s * (1 - s) * legendre<double>(k, 2 * s - 1);
        });
        b.dphi.push_back([h, k](double z) {
            const double s = z / h;
            const auto P = legendre_all<double>(k, 2 * s - 1);
            // P_k' from (x^2 - 1) P_k' = k (x P_k - P_{k-1}).
            const double x = 2 * s - 1;
            double dP = 0;
            if (k > 0) dP = std::abs(x * x - 1) < 1e-14 ? (x > 0 ? 1.0 : (k % 2 ? 1.0 : -1.0)) * k * (k + 1) / 2.0
                                                         : k * (x * P[k] - P[k - 1]) / (x * x - 1);
            return ((1 - 2 * s) * P[k] + s * (1 - s) * 2 * dP) / h;
        });
    }
    return b;
}

struct EquivalentOptions {
    double separation = 0.02;  // minimum sup |c2 - c1|
    std::size_t knots = 401;   // resampling grid for the returned profile
    double tolerance = 1e-13;  // relative moment mismatch accepted by Newton
    int max_newton = 100;
    std::optional<PerturbationBasis> basis;  // default: d + 1 bumps
};

struct EquivalentResult {
    VelocityProfile profile;
    std::vector<double> coefficients;
    std::vector<double> relative_residuals;  // per odd moment
    double separation = 0;
    int newton_iterations = 0;
};

// c2 = c1 + sum a_k phi_k with the last coefficient fixed and the first d solved so that the
// first d odd moments of the resampled c2 equal those of c1.
inline EquivalentResult construct_equivalent_profile(const VelocityProfile& base, std::size_t d,
                                                     const EquivalentOptions& opt = {}) {
    if (d == 0) throw DomainError("construct_equivalent_profile: degree must be at least 1");
    if (!(opt.separation > 0)) throw DomainError("construct_equivalent_profile: separation must be positive");
    const double h = base.depth();
    const PerturbationBasis basis = opt.basis ? *opt.basis : bump_basis(h, d + 1);
    if (basis.size() < d + 1) throw DomainError("construct_equivalent_profile: basis needs at least d + 1 members");
    const std::size_t nb = basis.size();

    std::vector<double> z;
    for (std::size_t i = 0; i < opt.knots; ++i) z.push_back(h * static_cast<double>(i) / (opt.knots - 1));
    z.insert(z.end(), base.knots().begin(), base.knots().end());
    std::sort(z.begin(), z.end());
    z.erase(std::unique(z.begin(), z.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), z.end());
    z.back() = h;

    std::vector<double> c1(z.size()), dc1(z.size());
    std::vector<std::vector<double>> P(nb, std::vector<double>(z.size())), dP = P;
    for (std::size_t i = 0; i < z.size(); ++i) {
        c1[i] = base.speed(z[i]);
        dc1[i] = base.slope(z[i]);
        for (std::size_t k = 0; k < nb; ++k) {
            P[k][i] = basis.phi[k](z[i]);
            dP[k][i] = basis.dphi[k](z[i]);
        }
    }
    auto build = [&](const std::vector<double>& a) {
        std::vector<double> c = c1, dc = dc1;
        for (std::size_t i = 0; i < z.size(); ++i)
            for (std::size_t k = 0; k < nb; ++k) {
                c[i] += a[k] * P[k][i];
                dc[i] += a[k] * dP[k][i];
            }
        for (std::size_t i = 0; i < z.size(); ++i)
            if (!(c[i] > 0)) throw NumericalError("construct_equivalent_profile: perturbed speed not positive; reduce separation");
        return VelocityProfile::from_samples(z, std::move(c), std::move(dc));
    };
    const auto target = detail::exact_moments(base, d);
    auto residual = [&](const VelocityProfile& prof) {
        const auto m = detail::exact_moments(prof, d);
        std::vector<double> r(d);
        for (std::size_t n = 0; n < d; ++n) r[n] = (m[n] - target[n]) / target[n];
        return r;
    };
    auto norm = [](const std::vector<double>& r) {
        double s = 0;
        for (double v : r) s = std::max(s, std::abs(v));
        return s;
    };
    // d/da_k int c^{2n-1} = (2n-1) int c^{2n-2} phi_k, scaled like the residual.
    auto jacobian = [&](const VelocityProfile& prof) {
        Matrix<double> J(d, d);
        for (std::size_t n = 0; n < d; ++n)
            for (std::size_t k = 0; k < d; ++k) {
                const double e = 2.0 * static_cast<double>(n) - 1;
                J(n, k) = e * detail::piecewise_integral(prof.knots(), [&](double zz) {
                              return std::pow(prof.speed(zz), e - 1) * basis.phi[k](zz);
                          }) / target[n];
            }
        return J;
    };
    auto solve_for = [&](double t, std::vector<double> a, int& iters) {
        a[d] = t;
        for (std::size_t k = d + 1; k < nb; ++k) a[k] = 0;
        auto prof = build(a);
        auto r = residual(prof);
        for (iters = 0; iters < opt.max_newton; ++iters) {
            if (norm(r) <= opt.tolerance) return std::pair{a, prof};
            std::vector<double> rhs(d);
            for (std::size_t n = 0; n < d; ++n) rhs[n] = -r[n];
            const auto step = solve(jacobian(prof), rhs);
            double lambda = 1;
            bool accepted = false;
            for (int b = 0; b < 30 && !accepted; ++b, lambda *= 0.5) {
                auto trial = a;
                for (std::size_t k = 0; k < d; ++k) trial[k] += lambda * step[k];
                try {
                    auto tp = build(trial);
                    auto tr = residual(tp);
                    if (norm(tr) < norm(r)) {
                        a = std::move(trial);
                        prof = std::move(tp);
                        r = std::move(tr);
                        accepted = true;
                    }
                } catch (const NumericalError&) {
                }
            }
            if (!accepted) break;
        }
        if (norm(r) <= opt.tolerance) return std::pair{a, prof};
        throw NumericalError("construct_equivalent_profile: Newton did not converge in " +
                             std::to_string(opt.max_newton) + " iterations; try a smaller separation");
    };
    auto sup_gap = [&](const VelocityProfile& prof) {
        double s = 0;
        for (int i = 0; i <= 4000; ++i) {
            const double zz = h * i / 4000.0;
            s = std::max(s, std::abs(prof.speed(zz) - base.speed(zz)));
        }
        return s;
    };

    // The one-parameter family is walked by scaling t until the separation is reached.
    std::vector<double> a(nb, 0.0);
    double t = 4 * opt.separation;
    int iters = 0;
    for (int outer = 0; outer < 40; ++outer) {
        auto [sol, prof] = solve_for(t, a, iters);
        const double gap = sup_gap(prof);
        if (gap >= opt.separation) {
            EquivalentResult out;
            out.coefficients = sol;
            out.relative_residuals = residual(prof);
            out.separation = gap;
            out.newton_iterations = iters;
            out.profile = std::move(prof);
            return out;
        }
        a = sol;
        const double grow = gap > 0 ? std::min(4.0, 1.05 * opt.separation / gap) : 2.0;
        for (std::size_t k = 0; k < d; ++k) a[k] *= grow;
        t *= grow;
    }
    throw NumericalError("construct_equivalent_profile: separation not reached; try a smaller separation");
}

// tau_a(p) - tau_b(p) for reflected rays, integrated as one pointwise difference on merged knots.
inline double reflected_traveltime_gap(const VelocityProfile& a, const VelocityProfile& b, double p) {
    if (!(p * std::max(a.max_speed(), b.max_speed()) < 1)) throw DomainError("ray not transmitted in both profiles");
    if (std::abs(a.depth() - b.depth()) > 1e-12 * a.depth()) throw DomainError("profiles have different depths");
    auto f = [&](double c) { return 1 / (c * std::sqrt((1 - p * c) * (1 + p * c))); };
    return 2 * detail::piecewise_integral(detail::merged_knots(a, b),
                                          [&](double z) { return f(a.speed(z)) - f(b.speed(z)); });
}

struct AmbiguityTolerances {
    std::size_t d = 0;
    std::vector<double> tolerances;  // eps p^{-2n} / (d |(-1/2 choose n)|), n < d
};

inline AmbiguityTolerances ambiguity_tolerances(double eps, double p_star, double c0) {
    const double x = c0 * p_star;
    if (!(eps > 0)) throw DomainError("ambiguity_tolerances: eps must be positive");
    if (!(x > 0 && x < 1)) throw DomainError("ambiguity_tolerances: need 0 < c0 p_star < 1");
    AmbiguityTolerances t;
    double pw = 1;
    do {
        ++t.d;
        pw *= x * x;
    } while (pw > eps * (1 + 1e-12));
    for (std::size_t n = 0; n < t.d; ++n)
        t.tolerances.push_back(eps * std::pow(p_star, -2.0 * static_cast<double>(n)) /
                               (static_cast<double>(t.d) * std::abs(binomial_minus_half(n))));
    return t;
}

}  // namespace layertomo
