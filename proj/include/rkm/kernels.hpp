#ifndef RKM_KERNELS_HPP
#define RKM_KERNELS_HPP

// Linear and Gaussian Gram/cross-Gram matrices and their sum, the combined
// kernel used by the restricted kernel machine variants.

#include <cmath>
#include <string>
#include <vector>

#include "rkm/errors.hpp"
#include "rkm/matrix.hpp"

namespace rkm {

enum class KernelKind { linear, gaussian };

struct Kernel {
    KernelKind kind = KernelKind::linear;
    double sigma = 1.0; // bandwidth, Gaussian only

    static Kernel linear() { return {KernelKind::linear, 1.0}; }
    static Kernel gaussian(double sigma) {
        if (!(sigma > 0.0)) throw InputError("gaussian kernel: sigma must be positive");
        return {KernelKind::gaussian, sigma};
    }
};

inline std::vector<double> row_sq_norms(const DenseMatrix& x) {
    std::vector<double> n(x.rows, 0.0);
    for (std::size_t i = 0; i < x.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.cols; ++j) s += x(i, j) * x(i, j);
        n[i] = s;
    }
    return n;
}

// Pairwise squared distances via ||a||^2 + ||b||^2 - 2 a.b, clamped at zero
// so rounding never produces a tiny negative. One matmul instead of a
// per-pair loop.
inline DenseMatrix squared_distances(const DenseMatrix& x, const DenseMatrix& z) {
    if (x.cols != z.cols)
        throw InputError("squared_distances: feature dimension mismatch");
    DenseMatrix d = matmul(x, transpose(z));
    const std::vector<double> nx = row_sq_norms(x);
    const std::vector<double> nz = row_sq_norms(z);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < z.rows; ++j)
            d(i, j) = std::max(0.0, nx[i] + nz[j] - 2.0 * d(i, j));
    return d;
}

inline DenseMatrix gaussian_from_sqdist(DenseMatrix d, double sigma) {
    if (!(sigma > 0.0)) throw InputError("gaussian kernel: sigma must be positive");
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (double& v : d.data) v = std::exp(-v * inv);
    return d;
}

inline DenseMatrix cross_gram(const DenseMatrix& x, const DenseMatrix& z, const Kernel& k) {
    if (x.cols != z.cols)
        throw InputError("cross_gram: feature dimension mismatch");
    if (k.kind == KernelKind::linear) return matmul(x, transpose(z));
    return gaussian_from_sqdist(squared_distances(x, z), k.sigma);
}

inline DenseMatrix gram(const DenseMatrix& x, const Kernel& k) {
    if (x.rows == 0) throw InputError("gram: empty input");
    DenseMatrix g = cross_gram(x, x, k);
    // Enforce exact symmetry and, for the Gaussian, an exact unit diagonal.
    for (std::size_t i = 0; i < g.rows; ++i) {
        for (std::size_t j = i + 1; j < g.cols; ++j) {
            const double v = 0.5 * (g(i, j) + g(j, i));
            g(i, j) = v;
            g(j, i) = v;
        }
        if (k.kind == KernelKind::gaussian) g(i, i) = 1.0;
    }
    return g;
}

// gram(x, linear) + gram(x, gaussian(sigma)), the entry-wise sum.
inline DenseMatrix combined_gram(const DenseMatrix& x, double sigma) {
    DenseMatrix g = gram(x, Kernel::linear());
    const DenseMatrix gg = gram(x, Kernel::gaussian(sigma));
    for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] += gg.data[i];
    return g;
}

inline DenseMatrix combined_cross_gram(const DenseMatrix& x, const DenseMatrix& z,
                                       double sigma) {
    DenseMatrix g = cross_gram(x, z, Kernel::linear());
    const DenseMatrix gg = cross_gram(x, z, Kernel::gaussian(sigma));
    for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] += gg.data[i];
    return g;
}

inline const char* kernel_kind_name(KernelKind k) {
    return k == KernelKind::linear ? "linear" : "gaussian";
}

inline KernelKind kernel_kind_from_name(const std::string& s) {
    if (s == "linear") return KernelKind::linear;
    if (s == "gaussian") return KernelKind::gaussian;
    throw InputError("unknown kernel kind: " + s);
}

} // namespace rkm

#endif
