#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "errors.hpp"
#include "geometry.hpp"
#include "hankel.hpp"
#include "linalg.hpp"
#include "precision.hpp"

namespace layertomo {

// Orthonormal polynomials of d mu = (1/rho - rho) d rho on [rho_lower, rho_upper]:
//   rho L_n = b_{n+1} L_{n+1} + a_n L_n + b_n L_{n-1}.
// coeffs[n][k] is the monomial coefficient of rho^k in L_n.
template <class Real>
struct OrthoPoly {
    std::vector<Real> a, b;  // b[0] unused
    std::vector<std::vector<Real>> coeffs;

    Real operator()(std::size_t n, const Real& x) const {
        Real acc = 0;
        for (std::size_t k = coeffs[n].size(); k-- > 0;) acc = acc * x + coeffs[n][k];
        return acc;
    }
};

// Stieltjes procedure on monomial coefficients, inner products taken from the closed-form moments.
template <class Real>
OrthoPoly<Real> orthopoly_mu(const SlownessGeometry& g, std::size_t N) {
    if (N == 0) throw DomainError("orthopoly_mu: need N >= 1");
    if (!(g.rho_lower < g.rho_upper)) throw DomainError("orthopoly_mu: empty support");
    std::vector<Real> mom(2 * N + 1);
    for (std::size_t k = 0; k < mom.size(); ++k) mom[k] = hankel_moment<Real>(static_cast<unsigned>(k), g);
    auto inner = [&](const std::vector<Real>& u, const std::vector<Real>& v, unsigned shift) {
        Real acc = 0;
        for (std::size_t i = 0; i < u.size(); ++i)
            for (std::size_t j = 0; j < v.size(); ++j) acc += u[i] * v[j] * mom[i + j + shift];
        return acc;
    };
    using std::sqrt;
    OrthoPoly<Real> out;
    out.coeffs.push_back({1 / sqrt(mom[0])});
    out.b.push_back(Real(0));
    for (std::size_t n = 0; n < N; ++n) {
        const auto& Ln = out.coeffs[n];
        out.a.push_back(inner(Ln, Ln, 1));
        if (n + 1 == N) break;
        // r = (rho - a_n) L_n - b_n L_{n-1}
        std::vector<Real> r(n + 2, Real(0));
        for (std::size_t k = 0; k <= n; ++k) {
            r[k + 1] += Ln[k];
            r[k] -= out.a[n] * Ln[k];
        }
        if (n > 0)
            for (std::size_t k = 0; k < n; ++k) r[k] -= out.b[n] * out.coeffs[n - 1][k];
        const Real nrm2 = inner(r, r, 0);
        if (!(nrm2 > 0))
            throw PrecisionExhausted("orthopoly_mu: norm lost positivity at degree " + std::to_string(n + 1) +
                                         "; last valid degree " + std::to_string(n),
                                     n);
        const Real bn = sqrt(nrm2);
        for (auto& c : r) c /= bn;
        out.b.push_back(bn);
        out.coeffs.push_back(std::move(r));
    }
    return out;
}

// H^{-1} for the pure moment Hankel matrix of order N against C^{-1} G C, where C holds the monomial
// coefficients of the orthonormal polynomials (rows) and G_{mn} = (1/2 pi) int L_m(e^{it}) conj L_n(e^{it}) dt
// is taken by the trapezoid rule on 2N + 2 points, exact for these trigonometric polynomials.
// Returns max |X - Y| / |Y| over entries.
template <class Real>
Real aitken_inverse_check(const SlownessGeometry& g, std::size_t N) {
    const auto H = moment_hankel<Real>(N, g);
    const Matrix<Real> Hinv = inverse(H);
    const auto op = orthopoly_mu<Real>(g, N);
    Matrix<Real> C(N, N);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t k = 0; k <= n; ++k) C(n, k) = op.coeffs[n][k];

    const std::size_t M = 2 * N + 2;
    const Real two_pi = boost::math::constants::two_pi<Real>();
    std::vector<std::vector<Real>> re(N, std::vector<Real>(M)), im(N, std::vector<Real>(M));
    using std::cos;
    using std::sin;
    for (std::size_t t = 0; t < M; ++t) {
        const Real th = two_pi * Real(t) / Real(M);
        for (std::size_t n = 0; n < N; ++n) {
            Real sr = 0, si = 0;
            for (std::size_t k = 0; k <= n; ++k) {
                sr += C(n, k) * cos(Real(k) * th);
                si += C(n, k) * sin(Real(k) * th);
            }
            re[n][t] = sr;
            im[n][t] = si;
        }
    }
    Matrix<Real> G(N, N);
    for (std::size_t m = 0; m < N; ++m)
        for (std::size_t n = 0; n < N; ++n) {
            Real acc = 0;
            for (std::size_t t = 0; t < M; ++t) acc += re[m][t] * re[n][t] + im[m][t] * im[n][t];
            G(m, n) = acc / Real(M);
        }
    // C H C^T = I gives H^{-1} = C^T C = C^{-1} (C C^T) C, and C C^T = G.
    const Matrix<Real> Y = inverse(C) * G * C;
    Real worst = 0;
    using std::abs;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            const Real dev = abs(Y(i, j) - Hinv(i, j)) / abs(Hinv(i, j));
            if (dev > worst) worst = dev;
        }
    return worst;
}

struct SzegoSequence {
    std::vector<double> ratio;  // r_N = c^{-2N-1} D_N / D_{N-1}, N = 0.. (D_{-1} = 1)
    std::vector<double> diffs;  // |r_N - r_{N-1}|, N >= 1
    bool truncated = false;
    std::size_t last_valid = 0;
};

// D_N / D_{N-1} is the squared last Cholesky pivot of H^{(N+1)}; mu_scale multiplies the measure.
template <class Real>
SzegoSequence szego_determinant_ratio(const SlownessGeometry& g, std::size_t n_max, double mu_scale = 1) {
    auto H = moment_hankel<Real>(n_max + 1, g);
    if (mu_scale != 1)
        for (std::size_t i = 0; i < H.rows(); ++i)
            for (std::size_t j = 0; j < H.cols(); ++j) H(i, j) *= Real(mu_scale);
    SzegoSequence s;
    Matrix<Real> L;
    try {
        L = cholesky(H);
    } catch (const PrecisionExhausted& e) {
        s.truncated = true;
        if (e.last_trustworthy == 0) return s;
        L = cholesky(H.leading(e.last_trustworthy));
    }
    const Real c = Real(g.rho_upper - g.rho_lower) / 4;
    Real cpow = 1 / c;  // c^{-2N-1}
    using std::ldexp;
    for (std::size_t N = 0; N < L.rows(); ++N) {
        // A pivot within 20 bits of the rounding level of H_NN carries no digits.
        if (!(L(N, N) * L(N, N) > ldexp(H(N, N), -static_cast<int>(mantissa_bits<Real>()) + 20))) {
            s.truncated = true;
            break;
        }
        s.ratio.push_back(static_cast<double>(cpow * L(N, N) * L(N, N)));
        if (N > 0) s.diffs.push_back(std::abs(s.ratio[N] - s.ratio[N - 1]));
        cpow /= c * c;
    }
    s.last_valid = s.ratio.empty() ? 0 : s.ratio.size() - 1;
    return s;
}

// 2 pi exp((1/2 pi) int_0^{2 pi} log mu'(h(t)) dt) with h(t) = mid + half cos t.
inline double szego_limit(const SlownessGeometry& g) {
    const double mid = (g.rho_upper + g.rho_lower) / 2, half = (g.rho_upper - g.rho_lower) / 2;
    const double pi = boost::math::constants::pi<double>();
    auto f = [&](double t) {
        const double r = mid + half * std::cos(t);
        // 1/r - r = (1 - r)(1 + r) / r, with 1 - r formed from the distance to rho_upper.
        const double one_minus = (1 - g.rho_upper) + half * 2 * std::sin(t / 2) * std::sin(t / 2);
        return std::log(one_minus) + std::log1p(r) - std::log(r);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    const double avg = ts.integrate(f, 0.0, pi) / pi;
    return 2 * pi * std::exp(avg);
}

}  // namespace layertomo
