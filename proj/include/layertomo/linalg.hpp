#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace layertomo {

template <class Real>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const Real& fill = Real(0))
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Real(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Real& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Real& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Matrix leading(std::size_t n) const {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = (*this)(i, j);
        return m;
    }

    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        Matrix m(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
        return m;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    template <class To>
    Matrix<To> cast() const {
        Matrix<To> m(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(i, j) = static_cast<To>((*this)(i, j));
        return m;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Real> data_;
};

template <class Real>
Matrix<Real> operator*(const Matrix<Real>& a, const Matrix<Real>& b) {
    if (a.cols() != b.rows()) throw DomainError("matrix product: inner dimensions differ");
    Matrix<Real> c(a.rows(), b.cols());
    Real t;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a(i, k) == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                t = a(i, k);
                t *= b(k, j);
                c(i, j) += t;
            }
        }
    return c;
}

template <class Real>
struct SymmetricEigen {
    std::vector<Real> values;  // descending
    Matrix<Real> vectors;      // columns, empty unless requested
    int sweeps = 0;
};

// Cyclic Jacobi. A pair is rotated unless |a_pq| <= eps * sqrt(|a_pp a_qq|),
// which keeps small eigenvalues of graded positive definite matrices relatively accurate.
template <class Real>
SymmetricEigen<Real> jacobi_eigen(Matrix<Real> a, bool want_vectors = false, int max_sweeps = 100) {
    using std::abs;
    using std::sqrt;
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DomainError("jacobi_eigen: matrix not square");
    SymmetricEigen<Real> out;
    if (want_vectors) out.vectors = Matrix<Real>::identity(n);
    const Real eps = std::numeric_limits<Real>::epsilon();
    Real theta, t, c, s, g, h, tmp, tau;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Real& apq = a(p, q);
                if (apq == 0) continue;
                tmp = a(p, p);
                tmp *= a(q, q);
                if (abs(apq) <= eps * sqrt(abs(tmp))) {
                    a(p, q) = 0;
                    a(q, p) = 0;
                    continue;
                }
                rotated = true;
                theta = a(q, q);
                theta -= a(p, p);
                theta /= 2 * apq;
                t = 1 / (abs(theta) + sqrt(1 + theta * theta));
                if (theta < 0) t = -t;
                c = 1 / sqrt(1 + t * t);
                s = t * c;
                tau = s / (1 + c);
                h = t * a(p, q);
                a(p, p) -= h;
                a(q, q) += h;
                a(p, q) = 0;
                a(q, p) = 0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    g = a(k, p);
                    h = a(k, q);
                    tmp = h;
                    tmp += g * tau;
                    tmp *= s;
                    a(k, p) = g - tmp;
                    tmp = g;
                    tmp -= h * tau;
                    tmp *= s;
                    a(k, q) = h + tmp;
                    a(p, k) = a(k, p);
                    a(q, k) = a(k, q);
                }
                if (want_vectors) {
                    auto& v = out.vectors;
                    for (std::size_t k = 0; k < n; ++k) {
                        g = v(k, p);
                        h = v(k, q);
                        v(k, p) = c * g - s * h;
                        v(k, q) = s * g + c * h;
                    }
                }
            }
        }
        out.sweeps = sweep;
        if (!rotated) {
            std::vector<std::size_t> order(n);
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            std::sort(order.begin(), order.end(),
                      [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
            out.values.reserve(n);
            for (std::size_t i : order) out.values.push_back(a(i, i));
            if (want_vectors) {
                Matrix<Real> v(n, n);
                for (std::size_t j = 0; j < n; ++j)
                    for (std::size_t k = 0; k < n; ++k) v(k, j) = out.vectors(k, order[j]);
                out.vectors = std::move(v);
            }
            return out;
        }
    }
    throw NumericalError("jacobi_eigen: no convergence after " + std::to_string(max_sweeps) + " sweeps");
}

// One-sided (Hestenes) Jacobi; returns singular values in descending order.
template <class Real>
std::vector<Real> singular_values(const Matrix<Real>& m, int max_sweeps = 100) {
    using std::abs;
    using std::sqrt;
    Matrix<Real> a = m.rows() >= m.cols() ? m : m.transpose();
    const std::size_t rows = a.rows(), n = a.cols();
    const Real eps = std::numeric_limits<Real>::epsilon();
    Real alpha, beta, gamma, zeta, t, c, s, x, y;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                alpha = 0;
                beta = 0;
                gamma = 0;
                for (std::size_t k = 0; k < rows; ++k) {
                    alpha += a(k, i) * a(k, i);
                    beta += a(k, j) * a(k, j);
                    gamma += a(k, i) * a(k, j);
                }
                if (gamma == 0 || abs(gamma) <= eps * sqrt(alpha * beta)) continue;
                rotated = true;
                zeta = (beta - alpha) / (2 * gamma);
                t = 1 / (abs(zeta) + sqrt(1 + zeta * zeta));
                if (zeta < 0) t = -t;
                c = 1 / sqrt(1 + t * t);
                s = c * t;
                for (std::size_t k = 0; k < rows; ++k) {
                    x = a(k, i);
                    y = a(k, j);
                    a(k, i) = c * x - s * y;
                    a(k, j) = s * x + c * y;
                }
            }
        if (!rotated) {
            std::vector<Real> sv(n);
            for (std::size_t j = 0; j < n; ++j) {
                Real acc = 0;
                for (std::size_t k = 0; k < rows; ++k) acc += a(k, j) * a(k, j);
                sv[j] = sqrt(acc);
            }
            std::sort(sv.begin(), sv.end(), std::greater<Real>());
            return sv;
        }
    }
    throw NumericalError("singular_values: no convergence after " + std::to_string(max_sweeps) + " sweeps");
}

// Lower Cholesky factor. Throws PrecisionExhausted naming the last order with a positive pivot.
template <class Real>
Matrix<Real> cholesky(const Matrix<Real>& a) {
    using std::sqrt;
    const std::size_t n = a.rows();
    Matrix<Real> l(n, n);
    Real acc;
    for (std::size_t j = 0; j < n; ++j) {
        acc = a(j, j);
        for (std::size_t k = 0; k < j; ++k) acc -= l(j, k) * l(j, k);
        if (!(acc > 0)) throw PrecisionExhausted("cholesky: non-positive pivot at order " + std::to_string(j + 1), j);
        l(j, j) = sqrt(acc);
        for (std::size_t i = j + 1; i < n; ++i) {
            acc = a(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
            l(i, j) = acc / l(j, j);
        }
    }
    return l;
}

template <class Real>
Matrix<Real> lower_triangular_inverse(const Matrix<Real>& l) {
    const std::size_t n = l.rows();
    Matrix<Real> inv(n, n);
    Real acc;
    for (std::size_t j = 0; j < n; ++j) {
        if (l(j, j) == 0) throw NumericalError("lower_triangular_inverse: zero diagonal");
        inv(j, j) = 1 / l(j, j);
        for (std::size_t i = j + 1; i < n; ++i) {
            acc = 0;
            for (std::size_t k = j; k < i; ++k) acc += l(i, k) * inv(k, j);
            inv(i, j) = -acc / l(i, i);
        }
    }
    return inv;
}

// Gauss-Jordan with partial pivoting. Pivots below tol * max|a| count as singular.
template <class Real>
Matrix<Real> inverse(Matrix<Real> a, const Real& tol = std::numeric_limits<Real>::epsilon()) {
    using std::abs;
    const std::size_t n = a.rows();
    Matrix<Real> inv = Matrix<Real>::identity(n);
    Real scale = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max<Real>(scale, abs(a(i, j)));
    Real f;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (abs(a(r, col)) > abs(a(piv, col))) piv = r;
        if (!(abs(a(piv, col)) > tol * scale))
            throw NumericalError("matrix numerically singular at working precision; increase precision");
        if (piv != col)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        const Real d = a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) /= d;
            inv(col, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a(r, col) == 0) continue;
            f = a(r, col);
            for (std::size_t j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

// Solves a x = b for a small dense system by partial pivoting.
template <class Real>
std::vector<Real> solve(Matrix<Real> a, std::vector<Real> b) {
    using std::abs;
    const std::size_t n = a.rows();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (abs(a(r, col)) > abs(a(piv, col))) piv = r;
        if (a(piv, col) == 0) throw NumericalError("solve: singular system");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const Real f = a(r, col) / a(col, col);
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }
    std::vector<Real> x(n);
    for (std::size_t i = n; i-- > 0;) {
        Real acc = b[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= a(i, j) * x[j];
        x[i] = acc / a(i, i);
    }
    return x;
}

}  // namespace layertomo
