#ifndef RKM_DATASET_HPP
#define RKM_DATASET_HPP

// Tabular ingestion, z-score standardization, random / per-class splits and
// k-fold partitioning. All splits are deterministic in (input, params, seed).

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "rkm/errors.hpp"
#include "rkm/labels.hpp"
#include "rkm/matrix.hpp"
#include "rkm/rng.hpp"

namespace rkm {

enum class Task { classification, regression };

inline const char* task_name(Task t) {
    return t == Task::classification ? "classification" : "regression";
}

struct Dataset {
    DenseMatrix x; // n x m features
    Task task = Task::classification;
    std::vector<int> y_class;  // classification targets as codec indices
    LabelCodec codec;          // classification only
    std::vector<double> y_real; // regression targets
    bool has_coords = false;
    std::vector<std::array<int, 2>> coords; // (row, col) per sample
    std::vector<std::array<int, 2>> background_coords; // unlabeled pixels

    std::size_t n() const { return x.rows; }
    std::size_t m() const { return x.cols; }

    std::string label_of(std::size_t i) const {
        return codec.class_ids[static_cast<std::size_t>(y_class[i])];
    }
};

struct CsvSchema {
    int label_column = -1; // 0-based column index; -1 means the last column
    bool has_header = true;
    std::vector<int> coord_columns; // empty, or exactly two 0-based indices
    Task task = Task::classification;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    cells.push_back(cur);
    for (std::string& c : cells) {
        std::size_t a = 0, b = c.size();
        while (a < b && (c[a] == ' ' || c[a] == '\t')) ++a;
        while (b > a && (c[b - 1] == ' ' || c[b - 1] == '\t' || c[b - 1] == '\r')) --b;
        c = c.substr(a, b - a);
    }
    return cells;
}

inline bool parse_double(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last && !s.empty();
}

} // namespace detail

// Loads a comma-delimited numeric table. Feature columns are every column
// that is neither the label nor a coordinate column. With coordinate
// columns declared and a classification task, rows labeled "0" are
// unlabeled background: excluded from the samples, coordinates retained.
inline Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw DataError("load_csv: cannot open '" + path + "'");

    Dataset d;
    d.task = schema.task;
    std::vector<std::string> raw_labels;
    std::string line;
    std::size_t line_no = 0;
    std::size_t expected_cells = 0;
    int label_col = schema.label_column;
    std::vector<std::vector<double>> rows;

    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && schema.has_header) continue;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        const std::vector<std::string> cells = detail::split_csv_line(line);
        if (expected_cells == 0) {
            expected_cells = cells.size();
            if (label_col < 0) label_col = static_cast<int>(expected_cells) - 1;
            if (label_col >= static_cast<int>(expected_cells))
                throw DataError("load_csv: label column " + std::to_string(label_col) +
                                " out of range for " + std::to_string(expected_cells) +
                                " columns");
            for (int cc : schema.coord_columns)
                if (cc < 0 || cc >= static_cast<int>(expected_cells) || cc == label_col)
                    throw DataError("load_csv: bad coordinate column " + std::to_string(cc));
            if (!schema.coord_columns.empty() && schema.coord_columns.size() != 2)
                throw DataError("load_csv: expected exactly two coordinate columns");
        }
        if (cells.size() != expected_cells)
            throw DataError("load_csv: line " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(expected_cells));

        std::array<int, 2> coord = {0, 0};
        bool is_coord_row = !schema.coord_columns.empty();
        if (is_coord_row) {
            for (int k = 0; k < 2; ++k) {
                double v = 0.0;
                if (!detail::parse_double(cells[static_cast<std::size_t>(schema.coord_columns[static_cast<std::size_t>(k)])], v) ||
                    v < 0.0 || v != static_cast<double>(static_cast<int>(v)))
                    throw DataError("load_csv: line " + std::to_string(line_no) +
                                    ": coordinate cell is not a nonnegative integer");
                coord[static_cast<std::size_t>(k)] = static_cast<int>(v);
            }
        }

        const std::string& label = cells[static_cast<std::size_t>(label_col)];
        if (is_coord_row && schema.task == Task::classification && label == "0") {
            d.background_coords.push_back(coord);
            continue;
        }

        std::vector<double> feat;
        feat.reserve(expected_cells);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (static_cast<int>(c) == label_col) continue;
            bool skip = false;
            for (int cc : schema.coord_columns)
                if (static_cast<int>(c) == cc) skip = true;
            if (skip) continue;
            double v = 0.0;
            if (!detail::parse_double(cells[c], v))
                throw DataError("load_csv: line " + std::to_string(line_no) +
                                ": cannot parse feature cell '" + cells[c] + "'");
            feat.push_back(v);
        }
        rows.push_back(std::move(feat));
        if (schema.task == Task::regression) {
            double v = 0.0;
            if (!detail::parse_double(label, v))
                throw DataError("load_csv: line " + std::to_string(line_no) +
                                ": cannot parse regression target '" + label + "'");
            d.y_real.push_back(v);
        } else {
            raw_labels.push_back(label);
        }
        if (is_coord_row) d.coords.push_back(coord);
    }

    if (rows.empty()) throw DataError("load_csv: '" + path + "' holds no samples");
    const std::size_t m = rows[0].size();
    if (m == 0) throw DataError("load_csv: '" + path + "' has no feature columns");
    d.x = DenseMatrix(rows.size(), m);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < m; ++j) d.x(i, j) = rows[i][j];
    d.has_coords = !schema.coord_columns.empty();
    if (d.task == Task::classification) {
        d.codec = make_codec(raw_labels);
        d.y_class.reserve(raw_labels.size());
        for (const std::string& l : raw_labels) d.y_class.push_back(d.codec.index_of(l));
    }
    return d;
}

// Loads a CSV where every column is a numeric feature.
inline DenseMatrix load_matrix_csv(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw DataError("load_matrix_csv: cannot open '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    std::size_t expected_cells = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && has_header) continue;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        const std::vector<std::string> cells = detail::split_csv_line(line);
        if (expected_cells == 0) expected_cells = cells.size();
        if (cells.size() != expected_cells)
            throw DataError("load_matrix_csv: line " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(expected_cells));
        std::vector<double> feat(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c)
            if (!detail::parse_double(cells[c], feat[c]))
                throw DataError("load_matrix_csv: line " + std::to_string(line_no) +
                                ": cannot parse cell '" + cells[c] + "'");
        rows.push_back(std::move(feat));
    }
    if (rows.empty()) throw DataError("load_matrix_csv: '" + path + "' holds no rows");
    DenseMatrix x(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < x.cols; ++j) x(i, j) = rows[i][j];
    return x;
}

// Per-feature mean and population standard deviation of a training split.
// Constant features pass through unchanged (mean 0, std 1 substituted).
struct Scaler {
    std::vector<double> mean;
    std::vector<double> std_dev;

    DenseMatrix apply(const DenseMatrix& x) const {
        if (x.cols != mean.size())
            throw InputError("scaler: feature dimension mismatch");
        DenseMatrix out = x;
        for (std::size_t i = 0; i < x.rows; ++i)
            for (std::size_t j = 0; j < x.cols; ++j)
                out(i, j) = (x(i, j) - mean[j]) / std_dev[j];
        return out;
    }
};

inline Scaler fit_scaler(const DenseMatrix& x) {
    if (x.rows == 0) throw InputError("fit_scaler: empty input");
    Scaler s;
    s.mean.assign(x.cols, 0.0);
    s.std_dev.assign(x.cols, 1.0);
    for (std::size_t j = 0; j < x.cols; ++j) {
        double lo = x(0, j), hi = x(0, j), sum = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) {
            const double v = x(i, j);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        if (lo == hi) continue; // constant feature: identity transform
        const double mean = sum / static_cast<double>(x.rows);
        double ss = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) {
            const double diff = x(i, j) - mean;
            ss += diff * diff;
        }
        s.mean[j] = mean;
        s.std_dev[j] = std::sqrt(ss / static_cast<double>(x.rows));
    }
    return s;
}

struct StandardizeResult {
    Dataset train;
    std::vector<Dataset> others;
    Scaler scaler;
};

// Z-score with statistics from the training split only.
inline StandardizeResult standardize(const Dataset& train, const std::vector<Dataset>& others) {
    StandardizeResult r;
    r.scaler = fit_scaler(train.x);
    r.train = train;
    r.train.x = r.scaler.apply(train.x);
    r.others.reserve(others.size());
    for (const Dataset& d : others) {
        Dataset s = d;
        s.x = r.scaler.apply(d.x);
        r.others.push_back(std::move(s));
    }
    return r;
}

// Row subset in the given index order; scene background carries over.
inline Dataset subset(const Dataset& d, const std::vector<std::size_t>& idx) {
    Dataset s;
    s.task = d.task;
    s.codec = d.codec;
    s.has_coords = d.has_coords;
    s.background_coords = d.background_coords;
    s.x = DenseMatrix(idx.size(), d.m());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= d.n()) throw InputError("subset: index out of range");
        for (std::size_t j = 0; j < d.m(); ++j) s.x(i, j) = d.x(idx[i], j);
        if (d.task == Task::classification)
            s.y_class.push_back(d.y_class[idx[i]]);
        else
            s.y_real.push_back(d.y_real[idx[i]]);
        if (d.has_coords) s.coords.push_back(d.coords[idx[i]]);
    }
    return s;
}

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Seeded shuffle, then the first floor(fraction*n) indices train.
inline SplitIndices split_random_indices(std::size_t n, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw InputError("split_random: fraction must be in (0, 1)");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Rng rng(seed);
    rng.shuffle(idx);
    const std::size_t n_train = static_cast<std::size_t>(fraction * static_cast<double>(n));
    SplitIndices s;
    s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    return s;
}

inline std::pair<Dataset, Dataset> split_random(const Dataset& d, double fraction,
                                                std::uint64_t seed) {
    const SplitIndices s = split_random_indices(d.n(), fraction, seed);
    return {subset(d, s.train), subset(d, s.test)};
}

// Per class (in codec order): seeded sample of the requested count into
// train, remainder into test. counts is aligned with codec.class_ids.
inline SplitIndices split_per_class_indices(const Dataset& d,
                                            const std::vector<std::size_t>& counts,
                                            std::uint64_t seed) {
    if (d.task != Task::classification)
        throw InputError("split_per_class: classification datasets only");
    if (counts.size() != d.codec.num_classes())
        throw InputError("split_per_class: one count per class required");
    Rng rng(seed);
    SplitIndices s;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < d.n(); ++i)
            if (d.y_class[i] == static_cast<int>(k)) members.push_back(i);
        if (counts[k] > members.size())
            throw DataError("split_per_class: class '" + d.codec.class_ids[k] + "' has " +
                            std::to_string(members.size()) + " samples, requested " +
                            std::to_string(counts[k]));
        rng.shuffle(members);
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < counts[k] ? s.train : s.test).push_back(members[i]);
    }
    return s;
}

inline std::pair<Dataset, Dataset> split_per_class(const Dataset& d,
                                                   const std::vector<std::size_t>& counts,
                                                   std::uint64_t seed) {
    const SplitIndices s = split_per_class_indices(d, counts, seed);
    return {subset(d, s.train), subset(d, s.test)};
}

inline std::pair<Dataset, Dataset> split_per_class(const Dataset& d, std::size_t count,
                                                   std::uint64_t seed) {
    return split_per_class(d, std::vector<std::size_t>(d.codec.num_classes(), count), seed);
}

struct Fold {
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> val_idx;
};

// Seeded shuffle into k folds; the first n mod k folds are one larger.
// Every sample validates exactly once.
inline std::vector<Fold> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > n) throw InputError("kfold: need 2 <= k <= n");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Rng rng(seed);
    rng.shuffle(idx);
    std::vector<Fold> folds(k);
    const std::size_t base = n / k, extra = n % k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (i >= pos && i < pos + len)
                folds[f].val_idx.push_back(idx[i]);
            else
                folds[f].train_idx.push_back(idx[i]);
        }
        pos += len;
    }
    return folds;
}

inline std::vector<Fold> kfold(const Dataset& d, std::size_t k, std::uint64_t seed) {
    return kfold_indices(d.n(), k, seed);
}

} // namespace rkm

#endif
