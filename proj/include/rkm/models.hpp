#ifndef RKM_MODELS_HPP
#define RKM_MODELS_HPP

// The four closed-form learners and their prediction rules.
//
//   rvfl      random hidden layer plus direct input links, ridge readout
//   rvflwodl  the same network without the direct links
//   rkm       restricted kernel machine, a binary classifier solved from
//             the stationarity conditions of its energy objective,
//             wrapped one-vs-all for multiclass
//   r2km      ridge system over the combined (linear + Gaussian) Gram
//
// All fits reduce to one SPD solve (rkm: a bordered variant of one).

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rkm/activations.hpp"
#include "rkm/dataset.hpp"
#include "rkm/errors.hpp"
#include "rkm/kernels.hpp"
#include "rkm/labels.hpp"
#include "rkm/linalg.hpp"
#include "rkm/matrix.hpp"
#include "rkm/random_features.hpp"
#include "rkm/rng.hpp"

namespace rkm {

enum class ModelKind { rvfl, rvflwodl, rkm, r2km };

inline const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::rvfl: return "rvfl";
        case ModelKind::rvflwodl: return "rvflwodl";
        case ModelKind::rkm: return "rkm";
        case ModelKind::r2km: return "r2km";
    }
    throw InputError("unknown model kind");
}

inline ModelKind model_kind_from_name(const std::string& s) {
    if (s == "rvfl") return ModelKind::rvfl;
    if (s == "rvflwodl") return ModelKind::rvflwodl;
    if (s == "rkm") return ModelKind::rkm;
    if (s == "r2km") return ModelKind::r2km;
    throw InputError("unknown model kind: " + s);
}

// One bundle covers every model kind; only the fields the kind uses matter.
// grid_index identifies the combination inside an enumerated grid and feeds
// the documented per-(combination, fold) sub-seed derivation.
struct HyperParams {
    double c_reg = 1.0;              // rvfl variants: ridge parameter C
    std::size_t hidden_nodes = 23;   // rvfl variants
    Activation activation = Activation::sigmoid; // rvfl variants
    double gamma = 1.0;              // rkm
    double eta = 1.0;                // rkm, r2km
    double lambda = 1.0;             // r2km
    double sigma = 1.0;              // Gaussian bandwidth (rkm, r2km)
    std::size_t grid_index = 0;
};

// ---------------------------------------------------------------------------
// RVFL / RVFLwoDL

enum class RidgeBranch { automatic, primal, dual };

// Ridge readout for a feature matrix h2 (n x p):
//   primal  (H2^T H2 + I/C)^-1 H2^T Y   when p <= n (or forced)
//   dual    H2^T (H2 H2^T + I/C)^-1 Y
// The two agree by the Woodbury identity whenever both are computable.
inline DenseMatrix ridge_output_weights(const DenseMatrix& h2, const DenseMatrix& y,
                                        double c_reg,
                                        RidgeBranch branch = RidgeBranch::automatic) {
    if (h2.rows == 0 || h2.cols == 0) throw InputError("ridge: empty feature matrix");
    if (h2.rows != y.rows) throw InputError("ridge: feature/target row mismatch");
    if (!(c_reg > 0.0)) throw InputError("ridge: C must be positive");
    const double ridge = 1.0 / c_reg;
    const bool use_primal =
        branch == RidgeBranch::primal ||
        (branch == RidgeBranch::automatic && h2.cols <= h2.rows);
    if (use_primal) {
        DenseMatrix a = matmul(transpose(h2), h2);
        for (std::size_t i = 0; i < a.rows; ++i) a(i, i) += ridge;
        return solve_spd(a, matmul(transpose(h2), y));
    }
    DenseMatrix a = matmul(h2, transpose(h2));
    for (std::size_t i = 0; i < a.rows; ++i) a(i, i) += ridge;
    return matmul(transpose(h2), solve_spd(a, y));
}

struct RvflModel {
    RandomLayer layer;
    bool direct_link = true;
    DenseMatrix w2; // (m + hidden_nodes) x c with direct links, else hidden_nodes x c
    Task task = Task::classification;
    LabelCodec codec; // classification only
};

inline RvflModel fit_rvfl(const DenseMatrix& x, const DenseMatrix& y_encoded, double c_reg,
                          std::size_t hidden_nodes, Activation activation,
                          std::uint64_t seed, bool direct_link) {
    if (x.rows == 0) throw InputError("fit_rvfl: empty data");
    if (x.rows != y_encoded.rows) throw InputError("fit_rvfl: target row mismatch");
    if (!(c_reg > 0.0)) throw InputError("fit_rvfl: C must be positive");
    RvflModel model;
    model.layer = init_layer(x.cols, hidden_nodes, activation, seed);
    model.direct_link = direct_link;
    const DenseMatrix h1 = transform(model.layer, x);
    const DenseMatrix h2 = direct_link ? hconcat(x, h1) : h1;
    model.w2 = ridge_output_weights(h2, y_encoded, c_reg);
    return model;
}

inline DenseMatrix predict_rvfl_scores(const RvflModel& model, const DenseMatrix& x) {
    const DenseMatrix h1 = transform(model.layer, x);
    const DenseMatrix h2 = model.direct_link ? hconcat(x, h1) : h1;
    return matmul(h2, model.w2);
}

namespace detail {

// scores = kx^T w / divisor. The 1/eta (or 1/gamma) scaling can make this
// reduction heavily cancellative, so each sum is accumulated in long double
// and rounded once.
inline DenseMatrix kernel_scores(const DenseMatrix& kx, const DenseMatrix& w,
                                 double divisor) {
    DenseMatrix s(kx.cols, w.cols);
    for (std::size_t i = 0; i < kx.cols; ++i)
        for (std::size_t c = 0; c < w.cols; ++c) {
            long double acc = 0.0L;
            for (std::size_t k = 0; k < kx.rows; ++k)
                acc += static_cast<long double>(kx(k, i)) *
                       static_cast<long double>(w(k, c));
            s(i, c) = static_cast<double>(acc / static_cast<long double>(divisor));
        }
    return s;
}

} // namespace detail

// ---------------------------------------------------------------------------
// RKM

// Binary model: dual features h and bias b per one-vs-all problem; y_signs
// holds the +-1 targets the problem was trained with (needed to score).
struct RkmModel {
    DenseMatrix x_train;
    double gamma = 1.0;
    double eta = 1.0;
    Kernel kernel = Kernel::gaussian(1.0);
    DenseMatrix h;       // n x problems
    DenseMatrix y_signs; // n x problems
    std::vector<double> b;
    LabelCodec codec; // empty for a bare binary fit

    bool binary() const { return h.cols == 1; }
};

namespace detail {

// Solves the bordered stationarity system
//   [ (1/gamma)(y y^T o K) + eta I   y ] [h]   [1]
//   [            y^T                 0 ] [b] = [0]
// by block elimination with two SPD solves, then refines (h, b) against the
// full bordered system with long-double residuals.
struct RkmSolution {
    std::vector<double> h;
    double b = 0.0;
};

inline RkmSolution rkm_solve(const DenseMatrix& k_gram, const std::vector<double>& y,
                             double gamma, double eta) {
    const std::size_t n = y.size();
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = y[i] * y[j] * k_gram(i, j) / gamma + (i == j ? eta : 0.0);

    SpdFactor f;
    try {
        f = spd_factor(m);
    } catch (const NumericError&) {
        throw NumericError("fit_rkm: degenerate labels or singular system");
    }

    DenseMatrix rhs(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        rhs(i, 0) = 1.0;
        rhs(i, 1) = y[i];
    }
    const DenseMatrix uv = spd_solve_refined(f, rhs); // u = M^-1 1, v = M^-1 y
    double ytu = 0.0, ytv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ytu += y[i] * uv(i, 0);
        ytv += y[i] * uv(i, 1);
    }
    if (!(std::abs(ytv) > 0.0) || !std::isfinite(ytv))
        throw NumericError("fit_rkm: degenerate labels or singular system");

    RkmSolution sol;
    sol.b = ytu / ytv;
    sol.h.resize(n);
    for (std::size_t i = 0; i < n; ++i) sol.h[i] = uv(i, 0) - sol.b * uv(i, 1);

    // Bordered refinement: residuals of both block rows, corrections via the
    // factored M and the cached v column.
    for (int step = 0; step < 2; ++step) {
        DenseMatrix r1(n, 1);
        long double r2 = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            long double s = 1.0L;
            const double* mi = &f.matrix.data[i * n];
            for (std::size_t j = 0; j < n; ++j)
                s -= static_cast<long double>(mi[j]) * static_cast<long double>(sol.h[j]);
            s -= static_cast<long double>(y[i]) * static_cast<long double>(sol.b);
            r1(i, 0) = static_cast<double>(s);
            r2 -= static_cast<long double>(y[i]) * static_cast<long double>(sol.h[i]);
        }
        const DenseMatrix du = cholesky_solve(f.lower, r1);
        double ytdu = 0.0;
        for (std::size_t i = 0; i < n; ++i) ytdu += y[i] * du(i, 0);
        const double db = (ytdu - static_cast<double>(r2)) / ytv;
        for (std::size_t i = 0; i < n; ++i) sol.h[i] += du(i, 0) - db * uv(i, 1);
        sol.b += db;
    }
    return sol;
}

} // namespace detail

// Binary fit; y holds +-1 labels with both signs present.
inline RkmModel fit_rkm(const DenseMatrix& x, const std::vector<double>& y, double gamma,
                        double eta, const Kernel& kernel) {
    if (x.rows == 0 || x.rows != y.size()) throw InputError("fit_rkm: bad shapes");
    if (!(gamma > 0.0) || !(eta > 0.0))
        throw InputError("fit_rkm: gamma and eta must be positive");
    bool has_pos = false, has_neg = false;
    for (double v : y) {
        if (v == 1.0) has_pos = true;
        else if (v == -1.0) has_neg = true;
        else throw InputError("fit_rkm: labels must be +1 or -1");
    }
    if (!has_pos || !has_neg)
        throw NumericError("fit_rkm: degenerate labels (single class)");

    const DenseMatrix k = gram(x, kernel);
    const detail::RkmSolution sol = detail::rkm_solve(k, y, gamma, eta);

    RkmModel model;
    model.x_train = x;
    model.gamma = gamma;
    model.eta = eta;
    model.kernel = kernel;
    model.h = DenseMatrix(y.size(), 1);
    model.y_signs = DenseMatrix(y.size(), 1);
    for (std::size_t i = 0; i < y.size(); ++i) {
        model.h(i, 0) = sol.h[i];
        model.y_signs(i, 0) = y[i];
    }
    model.b = {sol.b};
    return model;
}

// One-vs-all wrapper. Class k's problem labels its samples +1, the rest -1.
// With exactly two classes a single problem suffices: the second problem is
// the exact negation of the first.
inline RkmModel fit_rkm_multiclass(const DenseMatrix& x, const std::vector<int>& y_class,
                                   const LabelCodec& codec, double gamma, double eta,
                                   const Kernel& kernel) {
    const std::size_t c = codec.num_classes();
    if (c < 2) throw NumericError("fit_rkm: degenerate labels (single class)");
    if (x.rows != y_class.size()) throw InputError("fit_rkm: bad shapes");
    if (!(gamma > 0.0) || !(eta > 0.0))
        throw InputError("fit_rkm: gamma and eta must be positive");
    const std::size_t problems = (c == 2) ? 1 : c;

    const DenseMatrix k = gram(x, kernel);
    RkmModel model;
    model.x_train = x;
    model.gamma = gamma;
    model.eta = eta;
    model.kernel = kernel;
    model.codec = codec;
    model.h = DenseMatrix(x.rows, problems);
    model.y_signs = DenseMatrix(x.rows, problems);
    model.b.resize(problems);
    for (std::size_t p = 0; p < problems; ++p) {
        std::vector<double> y(x.rows);
        std::size_t positives = 0;
        for (std::size_t i = 0; i < x.rows; ++i) {
            y[i] = (y_class[i] == static_cast<int>(p)) ? 1.0 : -1.0;
            if (y[i] > 0.0) ++positives;
        }
        if (positives == 0 || positives == x.rows)
            throw NumericError("fit_rkm: degenerate labels for class '" +
                               codec.class_ids[p] + "'");
        const detail::RkmSolution sol = detail::rkm_solve(k, y, gamma, eta);
        for (std::size_t i = 0; i < x.rows; ++i) {
            model.h(i, p) = sol.h[i];
            model.y_signs(i, p) = y[i];
        }
        model.b[p] = sol.b;
    }
    return model;
}

// score_p(x) = (1/gamma) sum_j h_j y_j K(x_j, x) + b_p, one column per problem.
inline DenseMatrix predict_rkm_scores(const RkmModel& model, const DenseMatrix& x) {
    const DenseMatrix kx = cross_gram(model.x_train, x, model.kernel); // n_train x n_test
    DenseMatrix hy(model.h.rows, model.h.cols);
    for (std::size_t i = 0; i < hy.data.size(); ++i)
        hy.data[i] = model.h.data[i] * model.y_signs.data[i]; // signs: exact
    DenseMatrix scores = detail::kernel_scores(kx, hy, model.gamma); // n_test x problems
    for (std::size_t i = 0; i < scores.rows; ++i)
        for (std::size_t p = 0; p < scores.cols; ++p)
            scores(i, p) += model.b[p];
    return scores;
}

// Binary prediction: sign of the score, with sign(0) mapped to +1.
inline std::vector<double> predict_rkm(const RkmModel& model, const DenseMatrix& x) {
    if (!model.binary()) throw InputError("predict_rkm: binary models only");
    const DenseMatrix s = predict_rkm_scores(model, x);
    std::vector<double> out(s.rows);
    for (std::size_t i = 0; i < s.rows; ++i) out[i] = s(i, 0) >= 0.0 ? 1.0 : -1.0;
    return out;
}

// Class indices from one-vs-all scores. Binary: problem 0 is class 0's, so
// a nonnegative score decodes to class 0 (consistent with sign(0) -> +1).
inline std::vector<int> predict_rkm_labels(const RkmModel& model, const DenseMatrix& x) {
    const DenseMatrix s = predict_rkm_scores(model, x);
    std::vector<int> out(s.rows);
    if (model.binary()) {
        for (std::size_t i = 0; i < s.rows; ++i) out[i] = s(i, 0) >= 0.0 ? 0 : 1;
        return out;
    }
    return decode_scores(s);
}

// ---------------------------------------------------------------------------
// R2KM

struct R2kmModel {
    DenseMatrix x_train;
    DenseMatrix h; // n x c
    double eta = 1.0;
    double lambda = 1.0;
    double sigma = 1.0;
    Task task = Task::classification;
    LabelCodec codec; // classification only
};

// H = ((1/eta)(Omega + Omega_hat) + lambda I)^-1 Y over the combined
// linear + Gaussian Gram.
inline R2kmModel fit_r2km(const DenseMatrix& x, const DenseMatrix& y_encoded, double eta,
                          double lambda, double sigma) {
    if (x.rows == 0) throw InputError("fit_r2km: empty data");
    if (x.rows != y_encoded.rows) throw InputError("fit_r2km: target row mismatch");
    if (!(eta > 0.0) || !(lambda > 0.0) || !(sigma > 0.0))
        throw InputError("fit_r2km: eta, lambda, sigma must be positive");
    DenseMatrix a = combined_gram(x, sigma);
    for (double& v : a.data) v /= eta;
    for (std::size_t i = 0; i < a.rows; ++i) a(i, i) += lambda;
    R2kmModel model;
    model.x_train = x;
    model.h = solve_spd(a, y_encoded);
    model.eta = eta;
    model.lambda = lambda;
    model.sigma = sigma;
    return model;
}

// scores(x) = (1/eta) [K_gauss(X, x) + K_lin(X, x)]^T H
inline DenseMatrix predict_r2km_scores(const R2kmModel& model, const DenseMatrix& x) {
    const DenseMatrix kx = combined_cross_gram(model.x_train, x, model.sigma);
    return detail::kernel_scores(kx, model.h, model.eta);
}

// ---------------------------------------------------------------------------
// Uniform fit/predict over a standardized dataset

struct TrainedModel {
    ModelKind kind = ModelKind::r2km;
    Task task = Task::classification;
    LabelCodec codec;             // classification only
    std::optional<Scaler> scaler; // set by pipelines that standardized
    HyperParams params;
    std::uint64_t layer_seed = 0; // rvfl variants

    RvflModel rvfl;
    RkmModel rkm;
    R2kmModel r2km;
};

// Fits on already-standardized features. layer_seed feeds the rvfl random
// layer; rkm and r2km are seed-free.
inline TrainedModel fit_model(ModelKind kind, const Dataset& train, const HyperParams& p,
                              std::uint64_t layer_seed) {
    TrainedModel m;
    m.kind = kind;
    m.task = train.task;
    m.params = p;
    m.layer_seed = layer_seed;

    DenseMatrix y;
    if (train.task == Task::classification) {
        m.codec = train.codec;
        y = encode_labels(train.y_class, train.codec);
    } else {
        y = DenseMatrix(train.n(), 1);
        for (std::size_t i = 0; i < train.n(); ++i) y(i, 0) = train.y_real[i];
    }

    switch (kind) {
        case ModelKind::rvfl:
        case ModelKind::rvflwodl:
            m.rvfl = fit_rvfl(train.x, y, p.c_reg, p.hidden_nodes, p.activation, layer_seed,
                              kind == ModelKind::rvfl);
            m.rvfl.task = train.task;
            m.rvfl.codec = m.codec;
            break;
        case ModelKind::rkm:
            if (train.task != Task::classification)
                throw InputError("rkm supports classification only");
            m.rkm = fit_rkm_multiclass(train.x, train.y_class, train.codec, p.gamma, p.eta,
                                       Kernel::gaussian(p.sigma));
            break;
        case ModelKind::r2km:
            m.r2km = fit_r2km(train.x, y, p.eta, p.lambda, p.sigma);
            m.r2km.task = train.task;
            m.r2km.codec = m.codec;
            break;
    }
    return m;
}

inline DenseMatrix predict_scores(const TrainedModel& m, const DenseMatrix& x_scaled) {
    switch (m.kind) {
        case ModelKind::rvfl:
        case ModelKind::rvflwodl: return predict_rvfl_scores(m.rvfl, x_scaled);
        case ModelKind::rkm: return predict_rkm_scores(m.rkm, x_scaled);
        case ModelKind::r2km: return predict_r2km_scores(m.r2km, x_scaled);
    }
    throw InputError("unknown model kind");
}

inline std::vector<int> predict_labels(const TrainedModel& m, const DenseMatrix& x_scaled) {
    if (m.task != Task::classification)
        throw InputError("predict_labels: classification models only");
    if (m.kind == ModelKind::rkm) return predict_rkm_labels(m.rkm, x_scaled);
    return decode_scores(predict_scores(m, x_scaled));
}

inline std::vector<double> predict_values(const TrainedModel& m, const DenseMatrix& x_scaled) {
    if (m.task != Task::regression)
        throw InputError("predict_values: regression models only");
    const DenseMatrix s = predict_scores(m, x_scaled);
    std::vector<double> out(s.rows);
    for (std::size_t i = 0; i < s.rows; ++i) out[i] = s(i, 0);
    return out;
}

// Applies the stored scaler (when present) before predicting.
inline DenseMatrix scale_for_model(const TrainedModel& m, const DenseMatrix& x_raw) {
    return m.scaler ? m.scaler->apply(x_raw) : x_raw;
}

} // namespace rkm

#endif
