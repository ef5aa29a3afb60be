#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>

#include "errors.hpp"
#include "pchip.hpp"
#include "quadrature.hpp"
#include "velocity_model.hpp"

namespace layertomo {

enum class RayKind { diving, reflected };

inline const char* to_string(RayKind k) { return k == RayKind::diving ? "diving" : "reflected"; }

struct RaySolution {
    double p = 0;
    RayKind kind = RayKind::reflected;
    double traveltime = 0;
    double offset = 0;
    std::optional<double> turning_depth;
    double takeoff_angle = 0;  // cos(theta0) = p c0
};

namespace detail {

inline void require_transmitted(const VelocityProfile& profile, double p) {
    if (p < 0) throw DomainError("slowness must be non-negative");
    if (!(p * profile.max_speed() < 1))
        throw DomainError("ray not transmitted: p = " + std::to_string(p) + " is not below the minimum slowness");
}

}  // namespace detail

inline double traveltime_reflected(const VelocityProfile& profile, double p, double rel_tol = 1e-10) {
    detail::require_transmitted(profile, p);
    auto f = [&](double z) {
        const double c = profile.speed(z), pc = p * c;
        return 1.0 / (c * std::sqrt((1 - pc) * (1 + pc)));
    };
    return 2 * integrate(f, 0.0, profile.depth(), profile.knots(), {rel_tol});
}

inline double offset_reflected(const VelocityProfile& profile, double p, double rel_tol = 1e-10) {
    detail::require_transmitted(profile, p);
    if (p == 0) return 0.0;
    auto f = [&](double z) {
        const double c = profile.speed(z), pc = p * c;
        return pc / std::sqrt((1 - pc) * (1 + pc));
    };
    return 2 * integrate(f, 0.0, profile.depth(), profile.knots(), {rel_tol});
}

inline RaySolution trace_reflected(const VelocityProfile& profile, double p, double rel_tol = 1e-10) {
    RaySolution r;
    r.p = p;
    r.kind = RayKind::reflected;
    r.traveltime = traveltime_reflected(profile, p, rel_tol);
    r.offset = offset_reflected(profile, p, rel_tol);
    r.takeoff_angle = std::acos(p * profile.surface_speed());
    return r;
}

// Depth integrals up to the first turning point with z = Z - u^2.
inline RaySolution trace_diving(const VelocityProfile& profile, double p, double rel_tol = 1e-10) {
    if (!(p > 0)) throw DomainError("diving ray does not exist for non-positive slowness");
    if (!(p * profile.surface_speed() < 1))
        throw DomainError("diving ray does not exist: p * c0 >= 1");
    const auto zt = turning_depth(profile, p);
    if (!zt || !(*zt > 0)) throw DomainError("diving ray does not exist: no turning point");
    const double Z = *zt;
    const double cZ = profile.speed(Z), dcZ = profile.slope(Z);
    if (!(dcZ > 0)) throw DomainError("diving ray turns at a critical point of c; integrals diverge");

    // 1 - p c(z) is taken as p (c(Z) - c(z)); inside the turning interval the difference comes
    // from the Taylor form of the cubic so it stays accurate as z approaches Z.
    const auto& cubic = profile.interpolant();
    const std::size_t kZ = cubic.interval(Z);
    auto gap = [&](double u) {
        const double z = std::max(Z - u * u, 0.0);
        const double c = profile.speed(z);
        double g = z >= cubic.x()[kZ] ? p * cubic.drop_in(kZ, Z, u * u) : p * (cZ - c);
        if (!(g > 0)) g = p * dcZ * u * u;
        return std::pair<double, double>{c, g};
    };
    const double umax = std::sqrt(Z);
    std::vector<double> breaks;
    for (double zk : profile.knots())
        if (zk < Z) breaks.push_back(std::sqrt(Z - zk));
    auto ftau = [&](double u) {
        const auto [c, g] = gap(u);
        if (u == 0) return 4.0 / (c * std::sqrt(2 * p * dcZ));
        return 4 * u / (c * std::sqrt(g * (2 - g)));
    };
    auto fx = [&](double u) {
        const auto [c, g] = gap(u);
        if (u == 0) return 4.0 * p * c / std::sqrt(2 * p * dcZ);
        return 4 * u * p * c / std::sqrt(g * (2 - g));
    };
    RaySolution r;
    r.p = p;
    r.kind = RayKind::diving;
    r.turning_depth = Z;
    r.traveltime = integrate(ftau, 0.0, umax, breaks, {rel_tol});
    r.offset = integrate(fx, 0.0, umax, breaks, {rel_tol});
    r.takeoff_angle = std::acos(p * profile.surface_speed());
    return r;
}

inline RaySolution traveltime_diving(const VelocityProfile& profile, double p) { return trace_diving(profile, p); }
inline RaySolution offset_diving(const VelocityProfile& profile, double p) { return trace_diving(profile, p); }

struct SlownessCurve {
    std::vector<double> p;
    std::vector<double> x;
    std::vector<double> tau;
};

// From one branch of T(x) samples to (x(p), tau(p)) on the requested slowness grid.
inline SlownessCurve traveltime_curve_to_slowness(const std::vector<double>& x, const std::vector<double>& T,
                                                  const std::vector<double>& p_grid) {
    if (x.size() < 3) throw DomainError("traveltime branch needs at least three samples");
    const MonotoneCubic spline(x, T, TangentRule::monotone);
    const auto& d = spline.tangents();
    const double dir = d.back() - d.front();
    for (std::size_t i = 1; i < d.size(); ++i) {
        const double step = d[i] - d[i - 1];
        if (!(step * dir > 0)) throw BranchNotMonotone(i);
    }
    const double pmin = std::min(d.front(), d.back()), pmax = std::max(d.front(), d.back());
    SlownessCurve out;
    for (double p : p_grid) {
        if (p < pmin || p > pmax)
            throw DomainError("slowness " + std::to_string(p) + " outside the attained range of the branch");
        std::size_t k = 0;
        while (k + 2 < d.size() && !((d[k] - p) * (d[k + 1] - p) <= 0)) ++k;
        double xp;
        if (d[k] == p) {
            xp = x[k];
        } else if (d[k + 1] == p) {
            xp = x[k + 1];
        } else {
            auto g = [&](double t) { return spline.derivative_in(k, t) - p; };
            std::uintmax_t iters = 200;
            auto r = boost::math::tools::toms748_solve(g, x[k], x[k + 1], d[k] - p, d[k + 1] - p,
                                                       boost::math::tools::eps_tolerance<double>(52), iters);
            xp = 0.5 * (r.first + r.second);
        }
        out.p.push_back(p);
        out.x.push_back(xp);
        out.tau.push_back(spline.value_in(k, xp));
    }
    return out;
}

struct QResidual {
    double tau_depth = 0, x_depth = 0;
    double tau_q = 0, x_q = 0;
    double tau_residual = 0, x_residual = 0;
};

// Traveltime and offset rebuilt from the slowness distribution dz/dq:
//   tau = 2 int q^2 F / sqrt(q^2 - p^2) dq,  x = 2 int p F / sqrt(q^2 - p^2) dq,
// with point masses from flat layers added separately.
inline QResidual q_integral_check(const VelocityProfile& profile, double p, RayKind kind,
                                  std::size_t nodes_per_segment = 12) {
    QResidual out;
    double zlim;
    if (kind == RayKind::reflected) {
        const auto r = trace_reflected(profile, p);
        out.tau_depth = r.traveltime;
        out.x_depth = r.offset;
        zlim = profile.depth();
    } else {
        const auto r = trace_diving(profile, p);
        out.tau_depth = r.traveltime;
        out.x_depth = r.offset;
        zlim = *r.turning_depth;
    }
    const auto& zk = profile.knots();
    const auto& ck = profile.speeds();
    const auto& dk = profile.slopes();

    // Critical slowness values split the q-range into pieces with monotone branch structure.
    std::vector<double> crit{1.0 / ck.front(), kind == RayKind::diving ? p : 1.0 / profile.speed(zlim)};
    double flat_tau = 0, flat_x = 0;
    for (std::size_t k = 0; k < zk.size() && zk[k] < zlim; ++k) {
        if (dk[k] == 0) crit.push_back(1.0 / ck[k]);
        if (k + 1 < zk.size() && ck[k] == ck[k + 1]) {
            const double len = std::min(zk[k + 1], zlim) - zk[k];
            const double q = 1.0 / ck[k];
            flat_tau += 2 * q * q / std::sqrt(q * q - p * p) * len;
            flat_x += 2 * p / std::sqrt(q * q - p * p) * len;
        }
    }
    std::sort(crit.begin(), crit.end());
    crit.erase(std::unique(crit.begin(), crit.end()), crit.end());

    double tau = flat_tau, x = flat_x;
    const auto rule = gauss_legendre<double>(nodes_per_segment);
    const double pi = boost::math::constants::pi<double>();
    for (std::size_t i = 0; i + 1 < crit.size(); ++i) {
        const double a = crit[i], b = crit[i + 1], mid = (a + b) / 2, half = (b - a) / 2;
        // q = mid - half cos(theta) absorbs inverse square-root behaviour at both piece ends.
        auto piece = [&](double theta, bool want_tau) {
            const double ct = std::cos(theta), st = std::sin(theta), sh = std::sin(theta / 2);
            const double qa = 2 * half * sh * sh;
            const double q = theta < pi / 2 ? a + qa : mid - half * ct;
            if (st == 0) return 0.0;
            const double f = sdf_density_at(profile, q, zlim);
            if (!std::isfinite(f)) return 0.0;
            // q^2 - p^2 at the diving lower end q = p is formed as (q - a)(q + p).
            const double d2 = (a == p) ? qa * (q + p) : (q - p) * (q + p);
            const double w = half * st * f / std::sqrt(d2);
            return want_tau ? 2 * q * q * w : 2 * p * w;
        };
        // Knot slownesses are kinks of F; split there so each segment is smooth.
        std::vector<double> breaks;
        for (std::size_t k = 0; k < zk.size() && zk[k] < zlim; ++k) {
            const double q = 1.0 / ck[k];
            if (q > a && q < b) breaks.push_back(std::acos(std::clamp((mid - q) / half, -1.0, 1.0)));
        }
        // Fixed-order Gauss on each smooth segment: near a critical slowness the roots carry
        // rounding noise that would keep an adaptive rule refining without benefit.
        breaks.push_back(0.0);
        breaks.push_back(pi);
        std::sort(breaks.begin(), breaks.end());
        for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
            const double lo = breaks[s], hi = breaks[s + 1];
            if (!(hi > lo)) continue;
            for (std::size_t n = 0; n < rule.nodes.size(); ++n) {
                const double t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[n];
                const double w = 0.5 * (hi - lo) * rule.weights[n];
                tau += w * piece(t, true);
                if (p > 0) x += w * piece(t, false);
            }
        }
    }
    out.tau_q = tau;
    out.x_q = x;
    out.tau_residual = std::abs(tau - out.tau_depth) / out.tau_depth;
    out.x_residual = out.x_depth == 0 ? std::abs(x) : std::abs(x - out.x_depth) / out.x_depth;
    return out;
}

}  // namespace layertomo
