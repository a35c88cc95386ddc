#pragma once

// Dense Hermitian eigenvalues: Householder reduction to real symmetric
// tridiagonal form followed by implicit-shift QL.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "entforge/types.hpp"

namespace entforge::linalg {

/// max |A_ij - conj(A_ji)| for a row-major dim x dim matrix.
inline double hermiticity_defect(std::span<const cplx> a, std::size_t dim) {
    double worst = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i; j < dim; ++j)
            worst = std::max(worst, std::abs(a[i * dim + j] - std::conj(a[j * dim + i])));
    return worst;
}

namespace detail {

// Eigenvalues of the symmetric tridiagonal matrix with diagonal d and
// off-diagonal e (e[i] couples i and i+1, e.back() is ignored). Overwrites d.
inline void tridiagonal_ql(std::vector<double> &d, std::vector<double> &e) {
    const std::size_t n = d.size();
    if (n < 2) return;
    e[n - 1] = 0.0;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m = l;
        while (true) {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m == l) break;
            if (++iter > 64) throw NumericalError("tridiagonal QL did not converge");

            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (std::size_t ii = m; ii-- > l;) {
                const double f = s * e[ii];
                const double b = c * e[ii];
                r = std::hypot(f, g);
                e[ii + 1] = r;
                if (r == 0.0) {
                    d[ii + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[ii + 1] - p;
                r = (d[ii] - g) * s + 2.0 * c * b;
                p = s * r;
                d[ii + 1] = g + p;
                g = c * r - b;
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

}  // namespace detail

/// Eigenvalues (ascending) of a Hermitian matrix given row-major. The input
/// is taken by value and destroyed during the reduction. Only the lower
/// triangle's Hermitian partner consistency is assumed, not checked.
inline std::vector<double> hermitian_eigenvalues(std::vector<cplx> a, std::size_t dim) {
    if (a.size() != dim * dim) throw ConfigError("hermitian_eigenvalues: size mismatch");
    std::vector<double> d(dim), e(dim, 0.0);
    if (dim == 0) return d;

    std::vector<cplx> v(dim), p(dim);
    for (std::size_t k = 0; k + 2 < dim; ++k) {
        // Column below the diagonal, read through the Hermitian partner row.
        const std::size_t m = dim - k - 1;
        double norm2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            v[i] = std::conj(a[k * dim + (k + 1 + i)]);
            norm2 += std::norm(v[i]);
        }
        const double norm = std::sqrt(norm2);
        const double tail2 = norm2 - std::norm(v[0]);
        if (tail2 <= std::numeric_limits<double>::min()) {
            e[k] = std::abs(v[0]);
            continue;
        }
        const double abs0 = std::abs(v[0]);
        const cplx phase = abs0 > 0.0 ? v[0] / abs0 : cplx{1.0};
        const cplx alpha = -phase * norm;
        v[0] -= alpha;
        const double vnorm2 = tail2 + std::norm(v[0]);
        const double tau = 2.0 / vnorm2;
        e[k] = norm;

        // Trailing block B = A[k+1:, k+1:], rank-2 update B -= v w^H + w v^H.
        const std::size_t off = k + 1;
        cplx vhp = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const cplx *row = &a[(off + i) * dim + off];
            cplx acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) acc += row[j] * v[j];
            p[i] = tau * acc;
            vhp += std::conj(v[i]) * p[i];
        }
        const double half = 0.5 * tau * vhp.real();
        for (std::size_t i = 0; i < m; ++i) p[i] -= half * v[i];
        for (std::size_t i = 0; i < m; ++i) {
            cplx *row = &a[(off + i) * dim + off];
            const cplx vi = v[i];
            const cplx wi = p[i];
            for (std::size_t j = 0; j < m; ++j) row[j] -= vi * std::conj(p[j]) + wi * std::conj(v[j]);
        }
    }
    if (dim >= 2) e[dim - 2] = std::abs(a[(dim - 1) * dim + (dim - 2)]);
    for (std::size_t i = 0; i < dim; ++i) d[i] = a[i * dim + i].real();

    detail::tridiagonal_ql(d, e);
    std::sort(d.begin(), d.end());
    return d;
}

}  // namespace entforge::linalg
