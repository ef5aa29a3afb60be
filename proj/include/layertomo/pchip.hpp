#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "errors.hpp"

namespace layertomo {

enum class TangentRule { monotone, secant };

// Piecewise cubic Hermite interpolant. Tangents pass through the Fritsch-Carlson
// limiter, so each interval is monotone and extrema sit at knots.
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y, TangentRule rule = TangentRule::monotone)
        : x_(std::move(x)), y_(std::move(y)) {
        check();
        d_ = rule == TangentRule::monotone ? pchip_tangents() : secant_tangents();
        limit();
    }

    MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> d)
        : x_(std::move(x)), y_(std::move(y)), d_(std::move(d)) {
        check();
        if (d_.size() != x_.size()) throw DomainError("interpolant: tangent count differs from knot count");
        limit();
    }

    std::size_t size() const { return x_.size(); }
    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }
    const std::vector<double>& tangents() const { return d_; }
    double front() const { return x_.front(); }
    double back() const { return x_.back(); }

    // Interval k with x_k <= t <= x_{k+1}.
    std::size_t interval(double t) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), t);
        std::size_t k = static_cast<std::size_t>(it - x_.begin());
        k = k == 0 ? 0 : k - 1;
        return std::min(k, x_.size() - 2);
    }

    double value(double t) const { return value_in(interval(t), t); }
    double derivative(double t) const { return derivative_in(interval(t), t); }

    double value_in(std::size_t k, double t) const {
        const double h = x_[k + 1] - x_[k], s = (t - x_[k]) / h;
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y_[k] + (s3 - 2 * s2 + s) * h * d_[k] + (-2 * s3 + 3 * s2) * y_[k + 1] +
               (s3 - s2) * h * d_[k + 1];
    }

    double derivative_in(std::size_t k, double t) const {
        const double h = x_[k + 1] - x_[k], s = (t - x_[k]) / h;
        const double s2 = s * s;
        return (6 * s2 - 6 * s) / h * y_[k] + (3 * s2 - 4 * s + 1) * d_[k] + (-6 * s2 + 6 * s) / h * y_[k + 1] +
               (3 * s2 - 2 * s) * d_[k + 1];
    }

    // value_in(k, t) - value_in(k, t - delta) from the Taylor form of the cubic at t, free of cancellation.
    double drop_in(std::size_t k, double t, double delta) const {
        const double h = x_[k + 1] - x_[k], s = (t - x_[k]) / h;
        const double d2 = ((12 * s - 6) * (y_[k] - y_[k + 1]) / h + (6 * s - 4) * d_[k] + (6 * s - 2) * d_[k + 1]) / h;
        const double d3 = (12 * (y_[k] - y_[k + 1]) / h + 6 * (d_[k] + d_[k + 1])) / (h * h);
        return delta * (derivative_in(k, t) - delta * (d2 / 2 - delta * d3 / 6));
    }

    // Exact integral of the interpolant over interval k.
    double interval_integral(std::size_t k) const {
        const double h = x_[k + 1] - x_[k];
        return h * (y_[k] + y_[k + 1]) / 2 + h * h * (d_[k] - d_[k + 1]) / 12;
    }

    // Root of value(t) = target on interval k, assuming the target lies between the end values.
    double solve_in(std::size_t k, double target) const {
        double a = x_[k], b = x_[k + 1];
        double fa = y_[k] - target, fb = y_[k + 1] - target;
        if (fa == 0) return a;
        if (fb == 0) return b;
        if ((fa > 0) == (fb > 0)) throw DomainError("interpolant: target not bracketed on interval");
        auto f = [&](double t) { return value_in(k, t) - target; };
        std::uintmax_t iters = 200;
        auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52),
                                                   iters);
        return 0.5 * (r.first + r.second);
    }

private:
    void check() const {
        if (x_.size() < 2) throw DomainError("interpolant: need at least two knots");
        if (y_.size() != x_.size()) throw DomainError("interpolant: value count differs from knot count");
        for (std::size_t i = 0; i < x_.size(); ++i) {
            if (!std::isfinite(x_[i]) || !std::isfinite(y_[i]))
                throw DomainError("interpolant: non-finite entry at index " + std::to_string(i));
            if (i > 0 && !(x_[i] > x_[i - 1]))
                throw DomainError("interpolant: abscissae not strictly increasing at index " + std::to_string(i));
        }
    }

    double slope(std::size_t k) const { return (y_[k + 1] - y_[k]) / (x_[k + 1] - x_[k]); }

    std::vector<double> secant_tangents() const {
        const std::size_t n = x_.size();
        std::vector<double> d(n);
        d[0] = slope(0);
        d[n - 1] = slope(n - 2);
        for (std::size_t i = 1; i + 1 < n; ++i) d[i] = 0.5 * (slope(i - 1) + slope(i));
        return d;
    }

    // Fritsch-Butland weighted harmonic mean with the shape-preserving three-point end rule.
    std::vector<double> pchip_tangents() const {
        const std::size_t n = x_.size();
        std::vector<double> d(n);
        if (n == 2) {
            d[0] = d[1] = slope(0);
            return d;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double s0 = slope(i - 1), s1 = slope(i);
            if (s0 * s1 <= 0) {
                d[i] = 0;
                continue;
            }
            const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
            const double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
            d[i] = (w1 + w2) / (w1 / s0 + w2 / s1);
        }
        auto end = [](double h0, double h1, double s0, double s1) {
            double t = ((2 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
            if (t * s0 <= 0) return 0.0;
            if (s0 * s1 <= 0 && std::abs(t) > std::abs(3 * s0)) return 3 * s0;
            return t;
        };
        d[0] = end(x_[1] - x_[0], x_[2] - x_[1], slope(0), slope(1));
        d[n - 1] = end(x_[n - 1] - x_[n - 2], x_[n - 2] - x_[n - 3], slope(n - 2), slope(n - 3));
        return d;
    }

    void limit() {
        for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
            const double s = slope(k);
            if (s == 0) {
                d_[k] = d_[k + 1] = 0;
                continue;
            }
            if (d_[k] * s < 0) d_[k] = 0;
            if (d_[k + 1] * s < 0) d_[k + 1] = 0;
            const double a = d_[k] / s, b = d_[k + 1] / s, r = a * a + b * b;
            if (r > 9) {
                const double t = 3 / std::sqrt(r);
                d_[k] = t * a * s;
                d_[k + 1] = t * b * s;
            }
        }
    }

    std::vector<double> x_, y_, d_;
};

}  // namespace layertomo
