#ifndef RKM_LINALG_HPP
#define RKM_LINALG_HPP

// Symmetric positive definite solve: Cholesky with a diagonal-jitter
// fallback and iterative refinement with long-double residuals.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

#include "rkm/errors.hpp"
#include "rkm/matrix.hpp"

namespace rkm {

namespace detail {

// In-place lower Cholesky of a row-major symmetric matrix.
// Returns false on a non-positive or non-finite pivot.
inline bool cholesky_lower(DenseMatrix& a) {
    const std::size_t n = a.rows;
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        a(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / ljj;
        }
    }
    return true;
}

// Solves L L^T x = b for every column of b, given the factor from
// cholesky_lower (lower triangle of l).
inline DenseMatrix cholesky_solve(const DenseMatrix& l, const DenseMatrix& b) {
    const std::size_t n = l.rows, m = b.cols;
    DenseMatrix x = b;
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t i = 0; i < n; ++i) { // forward: L y = b
            double s = x(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
            x(i, c) = s / l(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) { // backward: L^T x = y
            double s = x(ii, c);
            for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x(k, c);
            x(ii, c) = s / l(ii, ii);
        }
    }
    return x;
}

// b - a*x with long-double accumulation, rounded back to double.
inline DenseMatrix residual_ld(const DenseMatrix& a, const DenseMatrix& x,
                               const DenseMatrix& b) {
    const std::size_t n = a.rows, m = x.cols;
    DenseMatrix r(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < m; ++c) {
            long double s = static_cast<long double>(b(i, c));
            const double* ai = &a.data[i * n];
            for (std::size_t k = 0; k < n; ++k)
                s -= static_cast<long double>(ai[k]) * static_cast<long double>(x(k, c));
            r(i, c) = static_cast<double>(s);
        }
    }
    return r;
}

} // namespace detail

// A factored SPD matrix: the (possibly jittered) symmetrized input and its
// lower Cholesky factor.
struct SpdFactor {
    DenseMatrix matrix; // symmetrized input plus jitter*I, the matrix factored
    DenseMatrix lower;  // Cholesky factor (lower triangle valid)
    double jitter = 0.0;
};

// Symmetry check (1e-10 relative), symmetrization as (a + a^T)/2, then
// Cholesky; on failure retries with a + tau*I for tau in
// {1e-12, 1e-10, 1e-8} before giving up.
inline SpdFactor spd_factor(const DenseMatrix& a) {
    if (a.rows != a.cols)
        throw InputError("solve_spd: matrix is not square");
    check_finite(a, "solve_spd");

    const std::size_t n = a.rows;
    const double scale = max_abs(a);
    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            asym = std::max(asym, std::abs(a(i, j) - a(j, i)));
    if (asym > 1e-10 * scale)
        throw InputError("solve_spd: matrix asymmetric beyond 1e-10 relative");

    DenseMatrix sym(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            sym(i, j) = 0.5 * (a(i, j) + a(j, i));

    static constexpr std::array<double, 4> ladder = {0.0, 1e-12, 1e-10, 1e-8};
    for (double tau : ladder) {
        SpdFactor f;
        f.matrix = sym;
        if (tau > 0.0)
            for (std::size_t i = 0; i < n; ++i) f.matrix(i, i) += tau;
        f.lower = f.matrix;
        if (!detail::cholesky_lower(f.lower)) continue;
        f.jitter = tau;
        return f;
    }
    throw NumericError("solve_spd: factorization failed even with diagonal jitter");
}

// Triangular solves plus iterative refinement with long-double residuals.
// Refinement continues while the normwise residual keeps shrinking, which
// pushes the solution to the accuracy floor of double storage even for
// badly scaled systems; well-conditioned ones exit after two steps.
inline DenseMatrix spd_solve_refined(const SpdFactor& f, const DenseMatrix& b) {
    if (b.rows != f.matrix.rows)
        throw InputError("solve_spd: right-hand side has " + std::to_string(b.rows) +
                         " rows, expected " + std::to_string(f.matrix.rows));
    check_finite(b, "solve_spd rhs");
    DenseMatrix x = detail::cholesky_solve(f.lower, b);
    const double b_scale = 1.0 + max_abs(b);
    double prev_rel = std::numeric_limits<double>::infinity();
    for (int step = 0; step < 30; ++step) {
        const DenseMatrix r = detail::residual_ld(f.matrix, x, b);
        const double rel = max_abs(r) / b_scale;
        if (step >= 2 && (rel <= 1e-10 || rel > 0.9 * prev_rel)) break;
        prev_rel = rel;
        const DenseMatrix dx = detail::cholesky_solve(f.lower, r);
        for (std::size_t i = 0; i < x.data.size(); ++i) x.data[i] += dx.data[i];
    }
    if (!x.all_finite())
        throw NumericError("solve_spd: solution is not finite");
    return x;
}

struct SpdSolveResult {
    DenseMatrix x;
    double jitter = 0.0; // diagonal shift that made the factorization succeed
};

inline SpdSolveResult solve_spd_ex(const DenseMatrix& a, const DenseMatrix& b) {
    const SpdFactor f = spd_factor(a);
    return {spd_solve_refined(f, b), f.jitter};
}

// Solves a x = b for symmetric positive definite a.
inline DenseMatrix solve_spd(const DenseMatrix& a, const DenseMatrix& b) {
    return solve_spd_ex(a, b).x;
}

} // namespace rkm

#endif
