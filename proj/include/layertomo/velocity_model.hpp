#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "pchip.hpp"

namespace layertomo {

// Layered wave speed c(z) on [0,h] as a monotone cubic Hermite interpolant.
class VelocityProfile {
public:
    VelocityProfile() = default;

    static VelocityProfile from_samples(std::vector<double> z, std::vector<double> c,
                                        TangentRule rule = TangentRule::monotone) {
        validate(z, c);
        return VelocityProfile(MonotoneCubic(std::move(z), std::move(c), rule));
    }

    static VelocityProfile from_samples(std::vector<double> z, std::vector<double> c, std::vector<double> dc) {
        validate(z, c);
        return VelocityProfile(MonotoneCubic(std::move(z), std::move(c), std::move(dc)));
    }

    template <class C, class DC>
    static VelocityProfile from_function(double h, C&& c, DC&& dc, std::size_t knots = 2001) {
        if (!(h > 0)) throw DomainError("profile depth extent must be positive");
        if (knots < 2) throw DomainError("profile needs at least two knots");
        std::vector<double> z(knots), v(knots), d(knots);
        for (std::size_t i = 0; i < knots; ++i) {
            z[i] = i + 1 == knots ? h : h * static_cast<double>(i) / static_cast<double>(knots - 1);
            v[i] = c(z[i]);
            d[i] = dc(z[i]);
        }
        return from_samples(std::move(z), std::move(v), std::move(d));
    }

    static VelocityProfile constant(double c0, double h) { return from_samples({0.0, h}, {c0, c0}, {0.0, 0.0}); }

    // First violated invariant of raw profile data, if any.
    static std::optional<std::string> first_violation(const std::vector<double>& z, const std::vector<double>& c) {
        if (z.size() != c.size()) return "depth and speed arrays differ in length";
        if (z.size() < 2) return "profile needs at least two knots";
        if (z.front() != 0.0) return "first knot depth must be 0";
        for (std::size_t i = 0; i < z.size(); ++i) {
            if (!std::isfinite(z[i]) || !std::isfinite(c[i]))
                return "non-finite value at knot " + std::to_string(i);
            if (!(c[i] > 0)) return "speed not strictly positive at knot " + std::to_string(i);
            if (i > 0 && !(z[i] > z[i - 1])) return "depths not strictly ascending at knot " + std::to_string(i);
        }
        return std::nullopt;
    }

    double depth() const { return cubic_.back(); }
    double surface_speed() const { return cubic_.y().front(); }
    const std::vector<double>& knots() const { return cubic_.x(); }
    const std::vector<double>& speeds() const { return cubic_.y(); }
    const std::vector<double>& slopes() const { return cubic_.tangents(); }
    const MonotoneCubic& interpolant() const { return cubic_; }
    double min_speed() const { return *std::min_element(speeds().begin(), speeds().end()); }
    double max_speed() const { return *std::max_element(speeds().begin(), speeds().end()); }

    double speed(double z) const {
        check_depth(z);
        return cubic_.value(z);
    }
    double slope(double z) const {
        check_depth(z);
        return cubic_.derivative(z);
    }

    // Same as speed() and slope() but continued linearly outside [0,h].
    double speed_extended(double z) const {
        if (z < 0) return speeds().front() + slopes().front() * z;
        if (z > depth()) return speeds().back() + slopes().back() * (z - depth());
        return cubic_.value(z);
    }
    double slope_extended(double z) const {
        if (z < 0) return slopes().front();
        if (z > depth()) return slopes().back();
        return cubic_.derivative(z);
    }

private:
    explicit VelocityProfile(MonotoneCubic c) : cubic_(std::move(c)) {}

    static void validate(const std::vector<double>& z, const std::vector<double>& c) {
        if (auto v = first_violation(z, c)) throw InvariantViolation("invalid profile: " + *v);
    }

    void check_depth(double z) const {
        if (!(z >= 0 && z <= depth()))
            throw DomainError("depth " + std::to_string(z) + " outside [0, " + std::to_string(depth()) + "]");
    }

    MonotoneCubic cubic_;
};

inline double eval_speed(const VelocityProfile& profile, double z) { return profile.speed(z); }

struct SlownessExtrema {
    double lower;  // 1 / max c
    double upper;  // 1 / min c
};

// Intervals of the interpolant are monotone, so the extrema are knot values.
inline SlownessExtrema slowness_extrema(const VelocityProfile& profile) {
    return {1.0 / profile.max_speed(), 1.0 / profile.min_speed()};
}

// Smallest z with c(z) = 1/p, or none.
inline std::optional<double> turning_depth(const VelocityProfile& profile, double p) {
    if (!(p > 0)) throw DomainError("turning_depth: slowness must be positive");
    const double target = 1.0 / p;
    const auto& y = profile.speeds();
    const auto& cubic = profile.interpolant();
    for (std::size_t k = 0; k + 1 < y.size(); ++k) {
        const double lo = std::min(y[k], y[k + 1]), hi = std::max(y[k], y[k + 1]);
        if (target >= lo && target <= hi) return cubic.solve_in(k, target);
    }
    return std::nullopt;
}

struct LevelCrossing {
    double z;
    double slope;  // c'(z)
};

// Depths in [0, zlim] where c(z) = target. Flat intervals at the target are reported in flat_length.
inline std::vector<LevelCrossing> level_crossings(const VelocityProfile& profile, double target, double zlim,
                                                  double* flat_length = nullptr) {
    const auto& x = profile.knots();
    const auto& y = profile.speeds();
    const auto& cubic = profile.interpolant();
    std::vector<LevelCrossing> out;
    double flat = 0;
    const double zcap = zlim * (1 + 1e-14);
    for (std::size_t k = 0; k + 1 < x.size() && x[k] <= zcap; ++k) {
        const double a = y[k] - target, b = y[k + 1] - target;
        if (a == 0 && b == 0) {
            flat += std::min(x[k + 1], zlim) - x[k];
            continue;
        }
        const bool take = (a < 0 && b > 0) || (a > 0 && b < 0) || b == 0 || (k == 0 && a == 0);
        if (!take) continue;
        const double r = cubic.solve_in(k, target);
        if (r > zcap) continue;
        if (!out.empty() && out.back().z == r) continue;
        out.push_back({r, cubic.derivative_in(k, r)});
    }
    if (flat_length) *flat_length = flat;
    return out;
}

struct SdfDensity {
    double p = 0;
    double depth_limit = 0;
    std::vector<double> q;
    std::vector<double> density;     // +inf where a root is critical or a flat layer sits at q
    std::vector<double> cumulative;  // measure of {z <= depth_limit : 1/c(z) <= q}
    std::vector<bool> singular;
};

// Upper depth limit for the slowness distribution: Z(p) when the ray turns, else h.
inline double sdf_depth_limit(const VelocityProfile& profile, double p) {
    if (p < 0) throw DomainError("sdf: slowness must be non-negative");
    if (p == 0) return profile.depth();
    return turning_depth(profile, p).value_or(profile.depth());
}

// Density dz/dq of depth over slowness at q, or +inf when singular.
inline double sdf_density_at(const VelocityProfile& profile, double q, double zlim) {
    double flat = 0;
    const auto roots = level_crossings(profile, 1.0 / q, zlim, &flat);
    if (flat > 0) return std::numeric_limits<double>::infinity();
    double f = 0;
    for (const auto& r : roots) {
        if (r.slope == 0) return std::numeric_limits<double>::infinity();
        const double c = 1.0 / q;
        f += c * c / std::abs(r.slope);
    }
    return f;
}

// Measure of {z in [0, zlim] : c(z) >= 1/q}.
inline double sdf_cumulative_at(const VelocityProfile& profile, double q, double zlim) {
    const double target = 1.0 / q;
    const auto& x = profile.knots();
    const auto& y = profile.speeds();
    const auto& cubic = profile.interpolant();
    double g = 0;
    for (std::size_t k = 0; k + 1 < x.size() && x[k] < zlim; ++k) {
        const double a = x[k], b = std::min(x[k + 1], zlim);
        const double ya = y[k], yb = b == x[k + 1] ? y[k + 1] : cubic.value_in(k, b);
        if (ya >= target && yb >= target) {
            g += b - a;
        } else if (ya < target && yb < target) {
            continue;
        } else {
            const double r = std::min(cubic.solve_in(k, target), b);
            g += yb > ya ? b - r : r - a;
        }
    }
    return g;
}

inline SdfDensity sdf(const VelocityProfile& profile, double p, const std::vector<double>& q_grid) {
    const auto ext = slowness_extrema(profile);
    const double slack = 1e-12 * ext.upper;
    SdfDensity out;
    out.p = p;
    out.depth_limit = sdf_depth_limit(profile, p);
    for (double q : q_grid) {
        if (!(q >= ext.lower - slack && q <= ext.upper + slack))
            throw DomainError("sdf: grid value " + std::to_string(q) + " outside [" + std::to_string(ext.lower) +
                              ", " + std::to_string(ext.upper) + "]");
        const double f = sdf_density_at(profile, q, out.depth_limit);
        out.q.push_back(q);
        out.density.push_back(f);
        out.singular.push_back(std::isinf(f));
        out.cumulative.push_back(sdf_cumulative_at(profile, q, out.depth_limit));
    }
    return out;
}

// Blocks [b_i, b_{i+1}] of the partition are laid out in the order given by `order`.
struct BlockPermutation {
    std::vector<double> breakpoints;
    std::vector<std::size_t> order;
};

namespace detail {
inline double smoothstep(double t) { return t <= 0 ? 0 : t >= 1 ? 1 : t * t * (3 - 2 * t); }
inline double smoothstep_slope(double t) { return t <= 0 || t >= 1 ? 0 : 6 * t * (1 - t); }
}  // namespace detail

// Rearranges layer blocks; neighbouring blocks are continued with the original profile
// (linearly past the domain ends) and joined by a C1 smoothstep blend of the given width.
inline VelocityProfile rearrange_profile(const VelocityProfile& profile, const BlockPermutation& perm,
                                         std::optional<double> blend_width = std::nullopt) {
    const double h = profile.depth();
    const auto& b = perm.breakpoints;
    const std::size_t m = b.size() < 2 ? 0 : b.size() - 1;
    if (m == 0) throw DomainError("rearrange_profile: need at least one block");
    if (b.front() != 0.0) throw DomainError("rearrange_profile: blocks must start at depth 0");
    if (b.back() > h * (1 + 1e-12)) throw DomainError("rearrange_profile: blocks extend below the profile");
    for (std::size_t i = 1; i < b.size(); ++i)
        if (!(b[i] > b[i - 1])) throw DomainError("rearrange_profile: breakpoints not strictly increasing");
    if (perm.order.size() != m) throw DomainError("rearrange_profile: permutation size differs from block count");
    {
        std::vector<bool> seen(m, false);
        for (std::size_t k : perm.order) {
            if (k >= m || seen[k]) throw DomainError("rearrange_profile: order is not a permutation");
            seen[k] = true;
        }
    }
    const double w = blend_width.value_or(1e-2 * h);
    if (!(w > 0)) throw DomainError("rearrange_profile: blend width must be positive");

    struct Placed {
        double start, end, source;
    };
    std::vector<Placed> blocks;
    double t = 0;
    for (std::size_t k : perm.order) {
        const double len = b[k + 1] - b[k];
        blocks.push_back({t, t + len, b[k]});
        t += len;
    }
    const double L = std::min(b.back(), h);
    if (L < h) blocks.push_back({L, h, L});
    for (const auto& blk : blocks)
        if (blk.end - blk.start <= w) throw DomainError("rearrange_profile: blend width exceeds a block length");

    auto block_value = [&](std::size_t i, double z, double& dv) {
        const double s = z - blocks[i].start + blocks[i].source;
        dv = profile.slope_extended(s);
        return profile.speed_extended(s);
    };
    auto eval = [&](double z, double& dc) {
        std::size_t i = 0;
        while (i + 1 < blocks.size() && z >= blocks[i + 1].start) ++i;
        // Nearest junction decides whether a blend applies.
        std::size_t left = i, right = i;
        if (i > 0 && z < blocks[i].start + w / 2) left = i - 1;
        else if (i + 1 < blocks.size() && z > blocks[i + 1].start - w / 2) right = i + 1;
        if (left == right) return block_value(i, z, dc);
        const double j = blocks[right].start;
        const double u = (z - (j - w / 2)) / w;
        const double chi = detail::smoothstep(u), dchi = detail::smoothstep_slope(u) / w;
        double d0, d1;
        const double v0 = block_value(left, z, d0), v1 = block_value(right, z, d1);
        dc = (1 - chi) * d0 + chi * d1 + dchi * (v1 - v0);
        return (1 - chi) * v0 + chi * v1;
    };

    const double spacing = std::min(h / 2000.0, w / 8.0);
    const auto& zk = profile.knots();
    std::vector<double> z{0.0};
    for (std::size_t k = 0; k + 1 < zk.size(); ++k) {
        const double len = zk[k + 1] - zk[k];
        const auto pieces = static_cast<std::size_t>(std::ceil(len / spacing - 1e-9));
        for (std::size_t s = 1; s < pieces; ++s) z.push_back(zk[k] + len * static_cast<double>(s) / pieces);
        z.push_back(zk[k + 1]);
    }
    std::vector<double> c(z.size()), dc(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        c[i] = eval(z[i], dc[i]);
        if (!(c[i] > 0)) throw DomainError("rearrange_profile: blended speed not positive");
    }
    return VelocityProfile::from_samples(std::move(z), std::move(c), std::move(dc));
}

}  // namespace layertomo
