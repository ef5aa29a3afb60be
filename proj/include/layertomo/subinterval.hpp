#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "errors.hpp"
#include "geometry.hpp"
#include "linalg.hpp"

namespace layertomo {

// eta = (1 - sqrt(delta)) / (1 + sqrt(delta)).
inline double delta_eta(double delta) {
    const double s = std::sqrt(delta);
    return (1 - s) / (1 + s);
}

// log_eta(delta) = log delta / log eta.
inline double log_eta_delta(double delta) { return std::log(delta) / std::log(delta_eta(delta)); }

struct DeltaOptimum {
    double delta = 0;
    double rate = 0;      // delta^{1 / sqrt(log_eta delta)} = exp(-exponent)
    double exponent = 0;  // sqrt(log eta * log delta)
    double objective = 0; // log eta * log delta
};

inline double delta_objective(double delta) { return std::log(delta_eta(delta)) * std::log(delta); }

// The root-exponential rate exp(-sqrt(log eta log delta)) is smallest where the product is largest.
inline DeltaOptimum optimize_delta() {
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::brent_find_minima([](double d) { return -delta_objective(d); }, 1e-6,
                                                         1 - 1e-6, 26, iters);
    DeltaOptimum o;
    o.delta = r.first;
    o.objective = -r.second;
    o.exponent = std::sqrt(o.objective);
    o.rate = std::pow(o.delta, 1 / std::sqrt(log_eta_delta(o.delta)));
    return o;
}

struct SubintervalBlock {
    int j = 0;
    double lo = 0, hi = 0;      // I_j intersected with [x_lo, x_hi]
    double Sigma = 0, Delta = 0; // of the untruncated block [(1+delta^{j+1}) x_lo, (1+delta^j) x_lo]
    double rho_upper = 0;        // (1 - sqrt delta) / (1 + sqrt delta)
    std::size_t n = 0;           // columns assigned to the block
};

struct SubintervalSchedule {
    double delta = 0;
    int J = 0, K = 0;
    std::vector<SubintervalBlock> blocks;
    std::size_t total() const {
        std::size_t s = 0;
        for (const auto& b : blocks) s += b.n;
        return s;
    }
};

// Geometric splitting of [x_lo, x_hi] toward x_lo and the per-block column counts
// n_j = floor((K - j) / 2 log_eta delta).
inline SubintervalSchedule subinterval_schedule(std::size_t N, double delta, const SlownessGeometry& g) {
    if (!(delta > 0 && delta < 1)) throw DomainError("subinterval_schedule: delta must lie in (0, 1)");
    if (!g.has_slownesses()) throw DomainError("subinterval_schedule: geometry needs slowness bounds");
    const double L = log_eta_delta(delta);
    SubintervalSchedule s;
    s.delta = delta;
    // Largest J with (1 + delta^J) x_lo >= x_hi, i.e. delta^J >= e - 1.
    s.J = static_cast<int>(std::floor(std::log(g.contrast - 1) / std::log(delta)));
    while (std::pow(delta, s.J) < g.contrast - 1) --s.J;
    while (std::pow(delta, s.J + 1) >= g.contrast - 1) ++s.J;
    const double kbound = s.J - 1 + 2 * std::sqrt(static_cast<double>(N) / L);
    s.K = static_cast<int>(std::ceil(kbound)) - 1;
    auto block = [&](int j, std::size_t n) {
        SubintervalBlock b;
        b.j = j;
        const double top = (1 + std::pow(delta, j)) * g.x_lo, bot = (1 + std::pow(delta, j + 1)) * g.x_lo;
        b.lo = std::max(bot, g.x_lo);
        b.hi = std::min(top, g.x_hi);
        b.Sigma = g.x_lo * (1 + (std::pow(delta, j) + std::pow(delta, j + 1)) / 2);
        b.Delta = g.x_lo * (std::pow(delta, j) - std::pow(delta, j + 1)) / 2;
        b.rho_upper = delta_eta(delta);
        b.n = n;
        return b;
    };
    if (s.K < s.J) {
        s.K = s.J;
        s.blocks.push_back(block(s.J, N));
        return s;
    }
    for (int j = s.J; j <= s.K; ++j) {
        const double nj = std::floor((s.K - j) / 2.0 * L);
        s.blocks.push_back(block(j, static_cast<std::size_t>(std::max(nj, 0.0))));
    }
    if (s.total() > N)
        throw InvariantViolation("subinterval_schedule: block counts sum to " + std::to_string(s.total()) +
                                 " > N = " + std::to_string(N));
    return s;
}

// sigma^2_{i+j+1}(A) <= sigma^2_{i+1}(B) + sigma^2_{j+1}(C) for A = (B, C) split after column split_col.
// Singular values past the rank count as zero; a rounding allowance of 64 eps sigma_1(A)^2 is granted.
inline bool weyl_check(const Matrix<double>& A, std::size_t split_col, std::size_t i, std::size_t j) {
    if (split_col == 0 || split_col >= A.cols()) throw DomainError("weyl_check: split must leave two non-empty blocks");
    const std::size_t rank_bound = std::min(A.rows(), A.cols());
    if (i + j + 1 > rank_bound) throw DomainError("weyl_check: index i + j + 1 exceeds min(rows, cols)");
    const auto sa = singular_values(A);
    const auto sb = singular_values(A.block(0, 0, A.rows(), split_col));
    const auto sc = singular_values(A.block(0, split_col, A.rows(), A.cols() - split_col));
    auto at = [](const std::vector<double>& s, std::size_t k) { return k < s.size() ? s[k] : 0.0; };
    const double lhs = at(sa, i + j) * at(sa, i + j);
    const double rhs = at(sb, i) * at(sb, i) + at(sc, j) * at(sc, j);
    const double slack = 64 * std::numeric_limits<double>::epsilon() * sa.front() * sa.front();
    return lhs <= rhs + slack;
}

}  // namespace layertomo
