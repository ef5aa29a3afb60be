#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace layertomo {

// Slowness window of the reflected-ray problem in the squared variables x = p^2, and the
// Bernstein-ellipse parameters that govern its conditioning. Built from (rho_lower, rho_upper)
// alone, the slowness fields are NaN and Delta = 1.
struct SlownessGeometry {
    double p_lo = NAN, p_hi = NAN;            // support of the slowness distribution
    double p_star_lo = NAN, p_star_hi = NAN;  // data slownesses
    double x_lo = NAN, x_hi = NAN, x_star_lo = NAN, x_star_hi = NAN;
    double Sigma = NAN, Delta = 1;
    double contrast = NAN;  // e = (p_hi / p_lo)^2
    double psi = NAN;       // grazing angle, cos psi = p_star_hi / p_lo
    double rho_lower = 0, rho_upper = 0;
    double alpha = 1, beta = 1;

    bool has_slownesses() const { return std::isfinite(p_lo); }
    // Transfinite diameter of [rho_lower, rho_upper] for the cosine map.
    double transfinite_diameter() const { return (rho_upper - rho_lower) / 4; }
};

// rho = xt - sqrt(xt^2 - 1), written as 1 / (xt + sqrt((xt - 1)(xt + 1))) with xt - 1 supplied
// separately so neither large xt nor xt near 1 loses digits.
inline double elliptical_radius_from_excess(double xt_minus_one) {
    if (!(xt_minus_one >= 0)) throw DomainError("elliptical map needs xt >= 1");
    const double xt = 1 + xt_minus_one;
    return 1 / (xt + std::sqrt(xt_minus_one * (xt + 1)));
}

inline double elliptical_radius(double xt) { return elliptical_radius_from_excess(xt - 1); }

inline double beta_from_rho(double rho_lower, double rho_upper) {
    const double t = (rho_upper + rho_lower + 2) / (rho_upper - rho_lower);
    return t + std::sqrt((t - 1) * (t + 1));
}

inline void check_rho(double rho_lower, double rho_upper) {
    if (!(rho_lower >= 0 && rho_lower < rho_upper && rho_upper <= 1))
        throw DomainError("geometry needs 0 <= rho_lower < rho_upper <= 1");
}

inline SlownessGeometry geometry_from_rho(double rho_lower, double rho_upper) {
    check_rho(rho_lower, rho_upper);
    SlownessGeometry g;
    g.rho_lower = rho_lower;
    g.rho_upper = rho_upper;
    g.alpha = 1 / rho_upper;
    g.beta = beta_from_rho(rho_lower, rho_upper);
    return g;
}

inline SlownessGeometry geometry_from_slownesses(double p_lo, double p_hi, double p_star_lo, double p_star_hi) {
    if (!(0 < p_star_lo && p_star_lo < p_star_hi && p_star_hi <= p_lo && p_lo < p_hi) || !std::isfinite(p_hi))
        throw DomainError("slownesses must satisfy 0 < p_* < p^* <= p_lo < p_hi");
    SlownessGeometry g;
    g.p_lo = p_lo;
    g.p_hi = p_hi;
    g.p_star_lo = p_star_lo;
    g.p_star_hi = p_star_hi;
    g.x_lo = p_lo * p_lo;
    g.x_hi = p_hi * p_hi;
    g.x_star_lo = p_star_lo * p_star_lo;
    g.x_star_hi = p_star_hi * p_star_hi;
    g.Sigma = (g.x_hi + g.x_lo) / 2;
    g.Delta = (g.x_hi - g.x_lo) / 2;
    g.contrast = g.x_hi / g.x_lo;
    g.psi = std::acos(p_star_hi / p_lo);
    // xt - 1 = 2 (1 - (p/p_lo)^2) / (e - 1), with 1 - r^2 = (1 - r)(1 + r).
    const double r = p_hi / p_lo;
    const double e_minus_one = (r - 1) * (r + 1);
    auto excess = [&](double p) {
        const double s = p / p_lo;
        return 2 * (1 - s) * (1 + s) / e_minus_one;
    };
    g.rho_upper = elliptical_radius_from_excess(excess(p_star_hi));
    g.rho_lower = elliptical_radius_from_excess(excess(p_star_lo));
    if (!(g.rho_lower > 0 && g.rho_lower < g.rho_upper && g.rho_upper <= 1))
        throw InvariantViolation("geometry: computed radii violate 0 < rho_* < rho^* <= 1");
    g.alpha = 1 / g.rho_upper;
    g.beta = beta_from_rho(g.rho_lower, g.rho_upper);
    return g;
}

// x~ = (Sigma - x) / Delta.
inline double reduced_coordinate(const SlownessGeometry& g, double x) { return (g.Sigma - x) / g.Delta; }

}  // namespace layertomo
