#ifndef RKM_MODEL_SELECTION_HPP
#define RKM_MODEL_SELECTION_HPP

// Hyperparameter grids and 5-fold cross-validated grid search.
//
// Scores are deterministic functions of (dataset, params, k, seed): folds
// come from the master seed, and rvfl layers are re-drawn per fold from
// derive_seed(master, combination index, fold index), so serial and
// parallel sweeps agree exactly.

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "rkm/dataset.hpp"
#include "rkm/errors.hpp"
#include "rkm/evaluation.hpp"
#include "rkm/models.hpp"
#include "rkm/rng.hpp"

namespace rkm {

struct SearchSpace {
    std::vector<double> r2km_eta, r2km_lambda, r2km_sigma;
    std::vector<double> rkm_gamma, rkm_eta, rkm_sigma;
    std::vector<double> rvfl_c;
    std::vector<std::size_t> rvfl_nodes;
    std::vector<Activation> rvfl_activations;

    // The benchmark grids: powers of ten for the regularizers, powers of
    // two for the Gaussian bandwidth, 3..203 hidden nodes in steps of 20,
    // all nine activations.
    static SearchSpace defaults() {
        SearchSpace s;
        for (int i = -5; i <= 5; ++i) {
            const double p10 = std::pow(10.0, i);
            s.r2km_eta.push_back(p10);
            s.r2km_lambda.push_back(p10);
            s.rkm_gamma.push_back(p10);
            s.rkm_eta.push_back(p10);
            s.rvfl_c.push_back(p10);
            const double p2 = std::pow(2.0, i);
            s.r2km_sigma.push_back(p2);
            s.rkm_sigma.push_back(p2);
        }
        for (std::size_t n = 3; n <= 203; n += 20) s.rvfl_nodes.push_back(n);
        for (int i = 1; i <= activation_count; ++i)
            s.rvfl_activations.push_back(activation_from_index(i));
        return s;
    }
};

namespace detail {
inline void require_positive(const std::vector<double>& v, const char* name) {
    if (v.empty()) throw InputError(std::string("search space: empty ") + name + " list");
    for (double x : v)
        if (!(x > 0.0)) throw InputError(std::string("search space: ") + name +
                                         " values must be positive");
}
} // namespace detail

// Cartesian product in lexicographic order, first parameter slowest:
// r2km (eta, lambda, sigma); rkm (gamma, eta, sigma); rvfl variants
// (C, hidden nodes, activation). grid_index runs 0..size-1 in this order.
inline std::vector<HyperParams> enumerate_grid(const SearchSpace& s, ModelKind kind) {
    std::vector<HyperParams> grid;
    if (kind == ModelKind::r2km) {
        detail::require_positive(s.r2km_eta, "eta");
        detail::require_positive(s.r2km_lambda, "lambda");
        detail::require_positive(s.r2km_sigma, "sigma");
        for (double eta : s.r2km_eta)
            for (double lambda : s.r2km_lambda)
                for (double sigma : s.r2km_sigma) {
                    HyperParams p;
                    p.eta = eta;
                    p.lambda = lambda;
                    p.sigma = sigma;
                    p.grid_index = grid.size();
                    grid.push_back(p);
                }
    } else if (kind == ModelKind::rkm) {
        detail::require_positive(s.rkm_gamma, "gamma");
        detail::require_positive(s.rkm_eta, "eta");
        detail::require_positive(s.rkm_sigma, "sigma");
        for (double gamma : s.rkm_gamma)
            for (double eta : s.rkm_eta)
                for (double sigma : s.rkm_sigma) {
                    HyperParams p;
                    p.gamma = gamma;
                    p.eta = eta;
                    p.sigma = sigma;
                    p.grid_index = grid.size();
                    grid.push_back(p);
                }
    } else {
        detail::require_positive(s.rvfl_c, "C");
        if (s.rvfl_nodes.empty() || s.rvfl_activations.empty())
            throw InputError("search space: empty rvfl node or activation list");
        for (std::size_t i = 1; i < s.rvfl_nodes.size(); ++i)
            if (s.rvfl_nodes[i] <= s.rvfl_nodes[i - 1])
                throw InputError("search space: node list must be strictly increasing");
        for (double c : s.rvfl_c)
            for (std::size_t nodes : s.rvfl_nodes)
                for (Activation act : s.rvfl_activations) {
                    HyperParams p;
                    p.c_reg = c;
                    p.hidden_nodes = nodes;
                    p.activation = act;
                    p.grid_index = grid.size();
                    grid.push_back(p);
                }
    }
    return grid;
}

namespace detail {

inline bool uses_kernels(ModelKind kind) {
    return kind == ModelKind::rkm || kind == ModelKind::r2km;
}

// Everything one fold needs to score any combination: standardized data,
// encoded targets and, for kernel models, Gram blocks per sigma. Grams are
// built through the same gram/cross_gram calls the plain fit path uses, so
// cached and uncached scoring agree bit for bit.
struct FoldContext {
    Dataset train;
    Dataset val;
    DenseMatrix y_enc; // encoded train targets (or one target column)
    DenseMatrix lin_gram;
    DenseMatrix lin_cross;
    std::map<double, DenseMatrix> gauss_gram;  // key: sigma
    std::map<double, DenseMatrix> gauss_cross; // key: sigma
};

class CvEngine {
public:
    CvEngine(ModelKind kind, const Dataset& train, std::size_t k, std::uint64_t seed,
             const std::vector<double>& sigmas)
        : kind_(kind), task_(train.task), seed_(seed) {
        if (kind == ModelKind::rkm && task_ != Task::classification)
            throw InputError("rkm supports classification only");
        const std::vector<Fold> folds = kfold(train, k, seed);
        folds_.reserve(folds.size());
        for (const Fold& f : folds) {
            FoldContext ctx;
            StandardizeResult sr =
                standardize(subset(train, f.train_idx), {subset(train, f.val_idx)});
            ctx.train = std::move(sr.train);
            ctx.val = std::move(sr.others[0]);
            if (task_ == Task::classification) {
                ctx.y_enc = encode_labels(ctx.train.y_class, ctx.train.codec);
            } else {
                ctx.y_enc = DenseMatrix(ctx.train.n(), 1);
                for (std::size_t i = 0; i < ctx.train.n(); ++i)
                    ctx.y_enc(i, 0) = ctx.train.y_real[i];
            }
            if (uses_kernels(kind)) {
                if (kind == ModelKind::r2km) {
                    ctx.lin_gram = gram(ctx.train.x, Kernel::linear());
                    ctx.lin_cross = cross_gram(ctx.train.x, ctx.val.x, Kernel::linear());
                }
                for (double sigma : sigmas) {
                    if (ctx.gauss_gram.count(sigma)) continue;
                    ctx.gauss_gram[sigma] = gram(ctx.train.x, Kernel::gaussian(sigma));
                    ctx.gauss_cross[sigma] =
                        cross_gram(ctx.train.x, ctx.val.x, Kernel::gaussian(sigma));
                }
            }
            folds_.push_back(std::move(ctx));
        }
    }

    std::size_t num_folds() const { return folds_.size(); }

    // Mean validation score: accuracy for classification, negative RMSE for
    // regression. A fold whose fit fails scores -inf, and so does the mean.
    double score_combo(const HyperParams& p, std::vector<double>* fold_scores) const {
        double sum = 0.0;
        bool failed = false;
        if (fold_scores) fold_scores->clear();
        for (std::size_t f = 0; f < folds_.size(); ++f) {
            double s;
            try {
                s = score_fold(folds_[f], p, f);
                if (!std::isfinite(s)) s = -std::numeric_limits<double>::infinity();
            } catch (const Error&) {
                s = -std::numeric_limits<double>::infinity();
            }
            if (fold_scores) fold_scores->push_back(s);
            if (std::isinf(s)) failed = true;
            sum += s;
        }
        if (failed) return -std::numeric_limits<double>::infinity();
        return sum / static_cast<double>(folds_.size());
    }

private:
    double score_fold(const FoldContext& ctx, const HyperParams& p, std::size_t fold) const {
        DenseMatrix scores;
        switch (kind_) {
            case ModelKind::rvfl:
            case ModelKind::rvflwodl: {
                const std::uint64_t sub = derive_seed(seed_, p.grid_index, fold);
                const RvflModel m =
                    fit_rvfl(ctx.train.x, ctx.y_enc, p.c_reg, p.hidden_nodes, p.activation,
                             sub, kind_ == ModelKind::rvfl);
                scores = predict_rvfl_scores(m, ctx.val.x);
                break;
            }
            case ModelKind::r2km: {
                DenseMatrix a = ctx.lin_gram;
                const DenseMatrix& gg = ctx.gauss_gram.at(p.sigma);
                for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += gg.data[i];
                for (double& v : a.data) v /= p.eta;
                for (std::size_t i = 0; i < a.rows; ++i) a(i, i) += p.lambda;
                const DenseMatrix h = solve_spd(a, ctx.y_enc);
                DenseMatrix kx = ctx.lin_cross;
                const DenseMatrix& gc = ctx.gauss_cross.at(p.sigma);
                for (std::size_t i = 0; i < kx.data.size(); ++i) kx.data[i] += gc.data[i];
                scores = matmul(transpose(kx), h);
                for (double& v : scores.data) v /= p.eta;
                break;
            }
            case ModelKind::rkm: {
                scores = rkm_fold_scores(ctx, p);
                break;
            }
        }
        if (task_ == Task::regression) {
            std::vector<double> pred(scores.rows);
            for (std::size_t i = 0; i < scores.rows; ++i) pred[i] = scores(i, 0);
            return -regression_metrics(ctx.val.y_real, pred).rmse;
        }
        std::vector<int> pred;
        if (kind_ == ModelKind::rkm && scores.cols == 1) {
            pred.resize(scores.rows);
            for (std::size_t i = 0; i < scores.rows; ++i)
                pred[i] = scores(i, 0) >= 0.0 ? 0 : 1;
        } else {
            pred = decode_scores(scores);
        }
        std::size_t hits = 0;
        for (std::size_t i = 0; i < pred.size(); ++i)
            if (pred[i] == ctx.val.y_class[i]) ++hits;
        return static_cast<double>(hits) / static_cast<double>(pred.size());
    }

    DenseMatrix rkm_fold_scores(const FoldContext& ctx, const HyperParams& p) const {
        const DenseMatrix& k_gram = ctx.gauss_gram.at(p.sigma);
        const DenseMatrix& k_cross = ctx.gauss_cross.at(p.sigma);
        const std::size_t c = ctx.train.codec.num_classes();
        const std::size_t problems = (c == 2) ? 1 : c;
        const std::size_t n = ctx.train.n();
        DenseMatrix alpha(n, problems);
        std::vector<double> b(problems);
        for (std::size_t pr = 0; pr < problems; ++pr) {
            std::vector<double> y(n);
            std::size_t positives = 0;
            for (std::size_t i = 0; i < n; ++i) {
                y[i] = (ctx.train.y_class[i] == static_cast<int>(pr)) ? 1.0 : -1.0;
                if (y[i] > 0.0) ++positives;
            }
            if (positives == 0 || positives == n)
                throw NumericError("fit_rkm: degenerate labels for class '" +
                                   ctx.train.codec.class_ids[pr] + "'");
            const RkmSolution sol = rkm_solve(k_gram, y, p.gamma, p.eta);
            for (std::size_t i = 0; i < n; ++i)
                alpha(i, pr) = sol.h[i] * y[i] / p.gamma;
            b[pr] = sol.b;
        }
        DenseMatrix scores = matmul(transpose(k_cross), alpha);
        for (std::size_t i = 0; i < scores.rows; ++i)
            for (std::size_t pr = 0; pr < problems; ++pr) scores(i, pr) += b[pr];
        return scores;
    }

    ModelKind kind_;
    Task task_;
    std::uint64_t seed_;
    std::vector<FoldContext> folds_;
};

} // namespace detail

// Mean k-fold validation score of one combination (accuracy, or negative
// RMSE for regression). Folds standardize on their own training part only.
inline double cross_validate(ModelKind kind, const Dataset& train, const HyperParams& p,
                             std::size_t k, std::uint64_t seed) {
    std::vector<double> sigmas;
    if (detail::uses_kernels(kind)) sigmas.push_back(p.sigma);
    const detail::CvEngine engine(kind, train, k, seed, sigmas);
    return engine.score_combo(p, nullptr);
}

struct ScoreRow {
    HyperParams params;
    double mean_score = 0.0;
    std::vector<double> fold_scores;
};

struct TuneResult {
    HyperParams best;
    double best_score = 0.0;
    std::vector<ScoreRow> table; // one row per combination, enumeration order
};

// Grid search over the model's search space. Ties break toward the earlier
// grid position; a sweep where every combination failed is an error.
// jobs > 1 evaluates combinations concurrently with identical results.
inline TuneResult tune(ModelKind kind, const Dataset& train, const SearchSpace& space,
                       std::size_t k, std::uint64_t seed, unsigned jobs = 1) {
    const std::vector<HyperParams> grid = enumerate_grid(space, kind);
    std::vector<double> sigmas;
    if (kind == ModelKind::r2km) sigmas = space.r2km_sigma;
    if (kind == ModelKind::rkm) sigmas = space.rkm_sigma;
    const detail::CvEngine engine(kind, train, k, seed, sigmas);

    TuneResult result;
    result.table.resize(grid.size());
    const unsigned workers =
        std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(grid.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            ScoreRow row;
            row.params = grid[i];
            row.mean_score = engine.score_combo(grid[i], &row.fold_scores);
            result.table[i] = std::move(row);
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    std::size_t best = grid.size();
    for (std::size_t i = 0; i < result.table.size(); ++i) {
        if (std::isinf(result.table[i].mean_score)) continue;
        if (best == grid.size() || result.table[i].mean_score > result.table[best].mean_score)
            best = i;
    }
    if (best == grid.size())
        throw NumericError("tune: every grid combination failed");
    result.best = result.table[best].params;
    result.best_score = result.table[best].mean_score;
    return result;
}

// Shortest exact decimal form of a double (round-trips losslessly).
inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// One CSV block per model: combination columns, mean score, per-fold scores.
// Columns a model does not use stay empty.
inline void write_score_table_csv(std::ostream& out, ModelKind kind, const TuneResult& tr,
                                  std::size_t k, bool header) {
    if (header) {
        out << "model,c_reg,hidden_nodes,activation,gamma,eta,lambda,sigma,mean_score";
        for (std::size_t f = 1; f <= k; ++f) out << ",fold_" << f;
        out << "\n";
    }
    for (const ScoreRow& row : tr.table) {
        const HyperParams& p = row.params;
        out << model_kind_name(kind) << ",";
        if (kind == ModelKind::rvfl || kind == ModelKind::rvflwodl)
            out << format_double(p.c_reg) << "," << p.hidden_nodes << ","
                << activation_name(p.activation) << ",,,,";
        else if (kind == ModelKind::rkm)
            out << ",,," << format_double(p.gamma) << "," << format_double(p.eta) << ",,"
                << format_double(p.sigma);
        else
            out << ",,,," << format_double(p.eta) << "," << format_double(p.lambda) << ","
                << format_double(p.sigma);
        out << "," << format_double(row.mean_score);
        for (double s : row.fold_scores) out << "," << format_double(s);
        out << "\n";
    }
}

} // namespace rkm

#endif
