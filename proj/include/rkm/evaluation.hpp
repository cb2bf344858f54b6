#ifndef RKM_EVALUATION_HPP
#define RKM_EVALUATION_HPP

// Classification metrics (per-class accuracy, OA, AA, Cohen's kappa) and
// regression errors (RMSE, MAE, positive/negative mean residuals).

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "rkm/errors.hpp"

namespace rkm {

struct ConfusionMatrix {
    std::size_t num_classes = 0;
    std::vector<std::size_t> counts; // row-major, rows = true, cols = predicted

    std::size_t& at(std::size_t t, std::size_t p) { return counts[t * num_classes + p]; }
    std::size_t at(std::size_t t, std::size_t p) const { return counts[t * num_classes + p]; }

    std::size_t total() const {
        std::size_t s = 0;
        for (std::size_t c : counts) s += c;
        return s;
    }
};

inline ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& pred,
                                 std::size_t num_classes) {
    if (truth.size() != pred.size())
        throw InputError("confusion: label vectors differ in length");
    ConfusionMatrix cm;
    cm.num_classes = num_classes;
    cm.counts.assign(num_classes * num_classes, 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int t = truth[i], p = pred[i];
        if (t < 0 || p < 0 || static_cast<std::size_t>(t) >= num_classes ||
            static_cast<std::size_t>(p) >= num_classes)
            throw InputError("confusion: label out of range");
        ++cm.at(static_cast<std::size_t>(t), static_cast<std::size_t>(p));
    }
    return cm;
}

struct ClassificationMetrics {
    // Per-class accuracy; empty when the class never occurs as a true label.
    std::vector<std::optional<double>> per_class;
    double oa = 0.0;
    double aa = 0.0;
    std::optional<double> kappa; // empty when chance agreement p_e == 1
};

inline ClassificationMetrics classification_metrics(const ConfusionMatrix& cm) {
    const std::size_t c = cm.num_classes;
    const double total = static_cast<double>(cm.total());
    if (total == 0.0) throw InputError("classification_metrics: empty confusion matrix");

    ClassificationMetrics m;
    m.per_class.resize(c);
    double trace = 0.0, aa_sum = 0.0, pe = 0.0;
    std::size_t defined = 0;
    for (std::size_t i = 0; i < c; ++i) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            row += static_cast<double>(cm.at(i, j));
            col += static_cast<double>(cm.at(j, i));
        }
        trace += static_cast<double>(cm.at(i, i));
        pe += row * col / (total * total);
        if (row > 0.0) {
            m.per_class[i] = static_cast<double>(cm.at(i, i)) / row;
            aa_sum += *m.per_class[i];
            ++defined;
        }
    }
    m.oa = trace / total;
    m.aa = defined > 0 ? aa_sum / static_cast<double>(defined) : 0.0;
    if (pe != 1.0) m.kappa = (m.oa - pe) / (1.0 - pe);
    return m;
}

struct RegressionErrors {
    double rmse = 0.0;
    double mae = 0.0;
    double pos_error = 0.0; // mean of positive residuals, 0 when none
    double neg_error = 0.0; // mean magnitude of negative residuals, 0 when none
};

inline RegressionErrors regression_metrics(const std::vector<double>& y_true,
                                           const std::vector<double>& y_pred) {
    if (y_true.size() != y_pred.size() || y_true.empty())
        throw InputError("regression_metrics: need equal nonempty vectors");
    RegressionErrors e;
    double ss = 0.0, sa = 0.0, pos_sum = 0.0, neg_sum = 0.0;
    std::size_t pos_n = 0, neg_n = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double r = y_pred[i] - y_true[i];
        ss += r * r;
        sa += std::abs(r);
        if (r > 0.0) { pos_sum += r; ++pos_n; }
        if (r < 0.0) { neg_sum += -r; ++neg_n; }
    }
    const double n = static_cast<double>(y_true.size());
    e.rmse = std::sqrt(ss / n);
    e.mae = sa / n;
    e.pos_error = pos_n ? pos_sum / static_cast<double>(pos_n) : 0.0;
    e.neg_error = neg_n ? neg_sum / static_cast<double>(neg_n) : 0.0;
    return e;
}

} // namespace rkm

#endif
