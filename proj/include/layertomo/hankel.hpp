#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "linalg.hpp"
#include "precision.hpp"

namespace layertomo {

// rho_lower = 0 makes the zeroth moment log-divergent; it is evaluated at this floor instead.
inline constexpr double kRhoLowerFloor = 1e-30;

struct KernelExpansion {
    double value = 0;
    double rho = 0;
    bool slow_convergence = false;  // xt == 1: the series has no geometric decay
};

// Partial sum sqrt(2/Delta) sum_{n < n_terms} rho^{n+1/2} P_n(yt) of 1/sqrt(y - x).
inline KernelExpansion legendre_kernel_expansion(double xt, double yt, std::size_t n_terms, double Delta = 1) {
    if (!(xt >= 1)) throw DomainError("legendre_kernel_expansion: need xt >= 1");
    if (!(yt >= -1 && yt <= 1)) throw DomainError("legendre_kernel_expansion: need yt in [-1, 1]");
    KernelExpansion out;
    out.rho = elliptical_radius(xt);
    out.slow_convergence = xt == 1;
    double p0 = 1, p1 = yt, pw = std::sqrt(out.rho), acc = 0;
    for (std::size_t n = 0; n < n_terms; ++n) {
        const double pn = n == 0 ? p0 : p1;
        acc += pw * pn;
        pw *= out.rho;
        if (n >= 1) {
            const double next = ((2 * n + 1) * yt * p1 - n * p0) / (n + 1);
            p0 = p1;
            p1 = next;
        }
    }
    out.value = std::sqrt(2 / Delta) * acc;
    return out;
}

// int rho^k (1/rho - rho) drho over [rho_lower, rho_upper], from the antiderivative.
template <class Real>
Real hankel_moment(unsigned k, const SlownessGeometry& g) {
    const Real b = g.rho_upper;
    if (g.rho_lower == g.rho_upper) return Real(0);
    if (k == 0) {
        const Real a = std::max(g.rho_lower, kRhoLowerFloor);
        using std::log;
        return log(b / a) - (b * b - a * a) / 2;
    }
    const Real a = g.rho_lower;
    using std::pow;
    return (pow(b, k) - pow(a, k)) / k - (pow(b, k + 2) - pow(a, k + 2)) / (k + 2);
}

template <class Real>
struct HankelSection {
    std::size_t order = 0;
    Matrix<Real> K;
    unsigned bits = mantissa_bits<Real>();
};

// K_{mn} = Delta ((m+1/2)(n+1/2))^{-1/2} moment(m+n).
template <class Real>
HankelSection<Real> build_hankel_section(std::size_t N, const SlownessGeometry& g) {
    if (N == 0) throw DomainError("hankel section order must be positive");
    std::vector<Real> mom(2 * N - 1), scale(N);
    for (std::size_t k = 0; k < mom.size(); ++k) mom[k] = hankel_moment<Real>(static_cast<unsigned>(k), g);
    using std::sqrt;
    for (std::size_t n = 0; n < N; ++n) scale[n] = 1 / sqrt(Real(n) + Real(1) / 2);
    HankelSection<Real> s;
    s.order = N;
    s.K = Matrix<Real>(N, N);
    const Real D = g.Delta;
    for (std::size_t m = 0; m < N; ++m)
        for (std::size_t n = 0; n <= m; ++n) s.K(m, n) = s.K(n, m) = D * scale[m] * scale[n] * mom[m + n];
    return s;
}

// Pure Hankel matrix of the moments, H_{mn} = moment(m+n).
template <class Real>
Matrix<Real> moment_hankel(std::size_t N, const SlownessGeometry& g) {
    std::vector<Real> mom(2 * N - 1);
    for (std::size_t k = 0; k < mom.size(); ++k) mom[k] = hankel_moment<Real>(static_cast<unsigned>(k), g);
    Matrix<Real> H(N, N);
    for (std::size_t m = 0; m < N; ++m)
        for (std::size_t n = 0; n < N; ++n) H(m, n) = mom[m + n];
    return H;
}

struct LinearFit {
    double slope = 0, intercept = 0, r2 = 0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw DomainError("linear_fit: need at least two paired samples");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        sse += r * r;
    }
    f.r2 = syy > 0 ? 1 - sse / syy : 1;
    return f;
}

struct SpectralReport {
    SlownessGeometry geometry;
    unsigned bits = 0;
    std::vector<std::vector<double>> eigenvalues;  // eigenvalues[N-1], descending
    std::vector<std::string> lambda_min_decimal;   // lambda_N^{(N)} at working precision
    std::vector<double> kappa;                     // sqrt(lambda_1 / lambda_N)

    std::size_t n_max() const { return eigenvalues.size(); }
    double lambda_min(std::size_t N) const { return eigenvalues.at(N - 1).back(); }
    double lambda_max(std::size_t N) const { return eigenvalues.at(N - 1).front(); }

    // Least squares of log lambda_N^{(N)} against N over [lo, hi].
    LinearFit fit_log_lambda_vs_n(std::size_t lo, std::size_t hi) const {
        std::vector<double> x, y;
        for (std::size_t N = lo; N <= hi; ++N) {
            x.push_back(static_cast<double>(N));
            y.push_back(std::log(lambda_min(N)));
        }
        return linear_fit(x, y);
    }

    // Least squares of log sigma_N = log lambda_N^{(N)} / 2 against sqrt(N) over [lo, hi].
    LinearFit fit_log_sigma_vs_sqrt_n(std::size_t lo, std::size_t hi) const {
        std::vector<double> x, y;
        for (std::size_t N = lo; N <= hi; ++N) {
            x.push_back(std::sqrt(static_cast<double>(N)));
            y.push_back(0.5 * std::log(lambda_min(N)));
        }
        return linear_fit(x, y);
    }
};

struct EigenDecayOptions {
    unsigned threads = 0;  // 0: hardware concurrency
};

// Eigenvalues of every principal section K_N, N = 1..N_max, by cyclic Jacobi in Real. Sections are
// independent and are spread over threads; each result depends only on its own section.
template <class Real>
SpectralReport eigen_decay(const SlownessGeometry& g, std::size_t n_max, const EigenDecayOptions& opt = {}) {
    if (n_max == 0) throw DomainError("eigen_decay: n_max must be positive");
    const auto full = build_hankel_section<Real>(n_max, g);
    std::vector<std::vector<Real>> values(n_max);
    unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_max));
    // Largest sections first so the work spreads evenly.
    std::vector<std::future<void>> jobs;
    for (unsigned t = 0; t < threads; ++t)
        jobs.push_back(std::async(std::launch::async, [&, t] {
            for (std::size_t N = n_max - t; N >= 1; N = N > threads ? N - threads : 0)
                values[N - 1] = jacobi_eigen(full.K.leading(N)).values;
        }));
    for (auto& j : jobs) j.get();

    SpectralReport rep;
    rep.geometry = g;
    rep.bits = mantissa_bits<Real>();
    const int floor_exp = -static_cast<int>(rep.bits) + 20;
    using std::ldexp;
    for (std::size_t N = 1; N <= n_max; ++N) {
        const auto& v = values[N - 1];
        const Real floor = ldexp(v.front(), floor_exp);
        if (!(v.back() > floor)) {
            const std::size_t last = N - 1;
            throw PrecisionExhausted("precision exhausted: lambda_N of section N = " + std::to_string(N) +
                                         " is below the " + std::to_string(rep.bits) +
                                         "-bit floor; last trustworthy N = " + std::to_string(last),
                                     last);
        }
        std::vector<double> d(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) d[i] = static_cast<double>(v[i]);
        rep.eigenvalues.push_back(std::move(d));
        rep.lambda_min_decimal.push_back(to_decimal(v.back()));
        using std::sqrt;
        rep.kappa.push_back(static_cast<double>(sqrt(v.front() / v.back())));
    }
    return rep;
}

inline SpectralReport eigen_decay(const SlownessGeometry& g, std::size_t n_max, unsigned bits,
                                  const EigenDecayOptions& opt = {}) {
    return with_precision(bits, [&](auto tag) { return eigen_decay<typename decltype(tag)::type>(g, n_max, opt); });
}

struct BoundCurves {
    std::vector<double> lower1, lower2, upper, szego;  // index N-1
};

// Growth laws for kappa_N, each scaled to equal kappa_1 at N = 1:
// N alpha^N, N^{-1/4} e^{gamma sqrt N}, N^{1/4} beta^N and c^{-N/2} with c the transfinite diameter.
inline BoundCurves bound_curves(const SlownessGeometry& g, std::size_t n_max, double kappa_1, double gamma) {
    BoundCurves b;
    const double c = g.transfinite_diameter();
    auto shape_l1 = [&](double N) { return std::log(N) + N * std::log(g.alpha); };
    auto shape_l2 = [&](double N) { return -0.25 * std::log(N) + gamma * std::sqrt(N); };
    auto shape_up = [&](double N) { return 0.25 * std::log(N) + N * std::log(g.beta); };
    auto shape_sz = [&](double N) { return -0.5 * N * std::log(c); };
    const double lk = std::log(kappa_1);
    for (std::size_t N = 1; N <= n_max; ++N) {
        const double n = static_cast<double>(N);
        b.lower1.push_back(std::exp(lk + shape_l1(n) - shape_l1(1)));
        b.lower2.push_back(std::exp(lk + shape_l2(n) - shape_l2(1)));
        b.upper.push_back(std::exp(lk + shape_up(n) - shape_up(1)));
        b.szego.push_back(std::exp(lk + shape_sz(n) - shape_sz(1)));
    }
    return b;
}

}  // namespace layertomo
