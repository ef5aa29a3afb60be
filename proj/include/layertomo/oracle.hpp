#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "linalg.hpp"
#include "polynomials.hpp"
#include "quadrature.hpp"

namespace layertomo {

enum class OracleBasis {
    legendre,          // Legendre polynomials on the data interval
    hankel_projector,  // span of rho(x)^{k+1/2}, k < M, orthonormalized by modified Gram-Schmidt
};

struct OracleOptions {
    OracleBasis basis = OracleBasis::legendre;
    std::size_t outer_nodes = 200;
};

// Singular values of P_M A Q_N for f(x) = int g(y) / sqrt(y - x) dy, assembled by quadrature in the
// reduced coordinates: y - x = Delta (xt - yt), xt in [xt(rho_upper), xt(rho_lower)], yt in [-1, 1].
// Q_N is the orthonormal Legendre basis in y. Outer points xt = xt_lo + s^2 and inner points
// yt = xt - w^2 keep the integrands smooth when xt_lo = 1.
template <class Real>
std::vector<Real> quadrature_oracle_A(const SlownessGeometry& g, std::size_t M, std::size_t N,
                                      const OracleOptions& opt = {}) {
    if (M == 0 || N == 0) throw DomainError("quadrature_oracle_A: M and N must be positive");
    if (!(g.rho_lower > 0)) throw DomainError("quadrature_oracle_A: needs rho_lower > 0 (finite data interval)");
    using std::sqrt;
    const Real one = 1;
    auto xt_of = [&](double rho) {
        const Real r = rho;
        return (r + one / r) / 2;
    };
    const Real xt_lo = xt_of(g.rho_upper), xt_hi = xt_of(g.rho_lower);
    const Real excess_lo = xt_lo - 1;  // exact zero when rho_upper = 1
    const Real smax = sqrt(xt_hi - xt_lo);
    const Real Delta = g.Delta;

    const auto outer = gauss_legendre<Real>(opt.outer_nodes, Real(0), smax);
    const auto inner = gauss_legendre<Real>(N + 1);
    const std::size_t Q = outer.nodes.size();
    std::vector<Real> xt(Q), wq(Q);
    for (std::size_t q = 0; q < Q; ++q) {
        const Real s = outer.nodes[q];
        xt[q] = xt_lo + s * s;
        wq[q] = outer.weights[q] * 2 * s * Delta;  // dx = Delta dxt, dxt = 2 s ds
    }

    // (A p_n)(x) = sqrt(Delta) int_{-1}^{1} p~_n(yt) / sqrt(xt - yt) dyt with p~_n = sqrt((n+1/2)/Delta) P_n.
    Matrix<Real> Ap(Q, N);
    for (std::size_t q = 0; q < Q; ++q) {
        const Real s = outer.nodes[q];
        const Real wlo = sqrt(excess_lo + s * s), whi = sqrt(xt[q] + 1);
        const Real mid = (wlo + whi) / 2, half = (whi - wlo) / 2;
        std::vector<Real> acc(N, Real(0));
        for (std::size_t k = 0; k < inner.nodes.size(); ++k) {
            const Real w = mid + half * inner.nodes[k];
            const auto P = legendre_all<Real>(N - 1, xt[q] - w * w);
            for (std::size_t n = 0; n < N; ++n) acc[n] += half * inner.weights[k] * 2 * P[n];
        }
        for (std::size_t n = 0; n < N; ++n) Ap(q, n) = sqrt(Delta) * sqrt((Real(n) + one / 2) / Delta) * acc[n];
    }

    // Outer basis sampled at the nodes, orthonormal in the discrete inner product sum wq f g.
    Matrix<Real> E(M, Q);
    if (opt.basis == OracleBasis::legendre) {
        const Real len = xt_hi - xt_lo;
        for (std::size_t q = 0; q < Q; ++q) {
            const auto P = legendre_all<Real>(M - 1, 2 * (xt[q] - xt_lo) / len - 1);
            for (std::size_t i = 0; i < M; ++i) E(i, q) = sqrt((2 * Real(i) + 1) / (Delta * len)) * P[i];
        }
    } else {
        for (std::size_t q = 0; q < Q; ++q) {
            const Real s = outer.nodes[q];
            const Real rho = one / (xt[q] + sqrt((excess_lo + s * s) * (xt[q] + 1)));
            Real pw = sqrt(rho);
            for (std::size_t i = 0; i < M; ++i) {
                E(i, q) = pw;
                pw *= rho;
            }
        }
        for (std::size_t i = 0; i < M; ++i) {
            for (std::size_t k = 0; k < i; ++k) {
                Real dot = 0;
                for (std::size_t q = 0; q < Q; ++q) dot += wq[q] * E(i, q) * E(k, q);
                for (std::size_t q = 0; q < Q; ++q) E(i, q) -= dot * E(k, q);
            }
            Real nrm = 0;
            for (std::size_t q = 0; q < Q; ++q) nrm += wq[q] * E(i, q) * E(i, q);
            if (!(nrm > 0)) throw NumericalError("quadrature_oracle_A: projector basis degenerate; increase precision");
            nrm = sqrt(nrm);
            for (std::size_t q = 0; q < Q; ++q) E(i, q) /= nrm;
        }
    }

    Matrix<Real> B(M, N);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t n = 0; n < N; ++n) {
            Real acc = 0;
            for (std::size_t q = 0; q < Q; ++q) acc += wq[q] * E(i, q) * Ap(q, n);
            B(i, n) = acc;
        }
    return singular_values(B);
}

}  // namespace layertomo
