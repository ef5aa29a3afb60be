#pragma once

#include <cstddef>
#include <vector>

namespace layertomo {

// P_0..P_nmax at x.
template <class Real>
std::vector<Real> legendre_all(std::size_t nmax, const Real& x) {
    std::vector<Real> p(nmax + 1);
    p[0] = 1;
    if (nmax >= 1) p[1] = x;
    for (std::size_t n = 1; n < nmax; ++n)
        p[n + 1] = ((2 * n + 1) * x * p[n] - n * p[n - 1]) / Real(n + 1);
    return p;
}

template <class Real>
Real legendre(std::size_t n, const Real& x) {
    return legendre_all(n, x)[n];
}

// Chebyshev polynomials of the second kind U_0..U_nmax.
template <class Real>
std::vector<Real> chebyshev_u_all(std::size_t nmax, const Real& x) {
    std::vector<Real> u(nmax + 1);
    u[0] = 1;
    if (nmax >= 1) u[1] = 2 * x;
    for (std::size_t n = 1; n < nmax; ++n) u[n + 1] = 2 * x * u[n] - u[n - 1];
    return u;
}

// Jacobi P_n^{(0,1)} from (2n+1) P_n = (n+1) P_n^{(0,1)} + n P_{n-1}^{(0,1)}.
template <class Real>
std::vector<Real> jacobi01_all(std::size_t nmax, const Real& x) {
    const auto p = legendre_all(nmax, x);
    std::vector<Real> j(nmax + 1);
    j[0] = 1;
    for (std::size_t n = 1; n <= nmax; ++n) j[n] = (Real(2 * n + 1) * p[n] - Real(n) * j[n - 1]) / Real(n + 1);
    return j;
}

}  // namespace layertomo
