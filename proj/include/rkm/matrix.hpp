#ifndef RKM_MATRIX_HPP
#define RKM_MATRIX_HPP

// Row-major dense matrix plus the handful of operations everything else
// reduces to. Samples are rows throughout the library.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "rkm/errors.hpp"

namespace rkm {

struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data; // row-major, size rows*cols

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline void check_finite(const DenseMatrix& m, const char* what) {
    if (!m.all_finite())
        throw InputError(std::string(what) + ": non-finite entries");
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols != b.rows)
        throw InputError("matmul: dimension mismatch (" + std::to_string(a.rows) + "x" +
                         std::to_string(a.cols) + " by " + std::to_string(b.rows) + "x" +
                         std::to_string(b.cols) + ")");
    DenseMatrix c(a.rows, b.cols);
    // i-k-j loop order keeps the inner loop contiguous in b and c.
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = &a.data[i * a.cols];
        double* ci = &c.data[i * b.cols];
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = &b.data[k * b.cols];
            for (std::size_t j = 0; j < b.cols; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

inline DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

// Column-stacking [a b]; rows must match.
inline DenseMatrix hconcat(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows != b.rows) throw InputError("hconcat: row count mismatch");
    DenseMatrix c(a.rows, a.cols + b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < a.cols; ++j) c(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols; ++j) c(i, a.cols + j) = b(i, j);
    }
    return c;
}

inline double max_abs(const DenseMatrix& m) {
    double v = 0.0;
    for (double x : m.data) v = std::max(v, std::abs(x));
    return v;
}

// max_i |a_i - b_i| / (1 + max_i |b_i|): the relative agreement measure used
// by the solver contract and the equivalence tests.
inline double rel_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows != b.rows || a.cols != b.cols)
        throw InputError("rel_diff: shape mismatch");
    double num = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        num = std::max(num, std::abs(a.data[i] - b.data[i]));
    return num / (1.0 + max_abs(b));
}

} // namespace rkm

#endif
