#ifndef RKM_LABELS_HPP
#define RKM_LABELS_HPP

// Multiclass label codec: one-hot rows with +1 for the true class and -1
// elsewhere; decoding is row argmax with ties to the lowest class index.

#include <cstddef>
#include <string>
#include <vector>

#include "rkm/errors.hpp"
#include "rkm/matrix.hpp"

namespace rkm {

struct LabelCodec {
    std::vector<std::string> class_ids; // index -> display label, stable order

    std::size_t num_classes() const { return class_ids.size(); }

    int index_of(const std::string& label) const {
        for (std::size_t i = 0; i < class_ids.size(); ++i)
            if (class_ids[i] == label) return static_cast<int>(i);
        throw InputError("label codec: unknown label '" + label + "'");
    }
};

// Builds a codec from labels in first-appearance order.
inline LabelCodec make_codec(const std::vector<std::string>& labels) {
    LabelCodec codec;
    for (const std::string& l : labels) {
        bool seen = false;
        for (const std::string& c : codec.class_ids)
            if (c == l) { seen = true; break; }
        if (!seen) codec.class_ids.push_back(l);
    }
    return codec;
}

inline DenseMatrix encode_labels(const std::vector<int>& class_idx, const LabelCodec& codec) {
    const std::size_t c = codec.num_classes();
    DenseMatrix y(class_idx.size(), c, -1.0);
    for (std::size_t i = 0; i < class_idx.size(); ++i) {
        const int k = class_idx[i];
        if (k < 0 || static_cast<std::size_t>(k) >= c)
            throw InputError("encode_labels: class index out of range");
        y(i, static_cast<std::size_t>(k)) = 1.0;
    }
    return y;
}

// Row argmax; ties go to the lowest class index.
inline std::vector<int> decode_scores(const DenseMatrix& scores) {
    std::vector<int> out(scores.rows);
    for (std::size_t i = 0; i < scores.rows; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < scores.cols; ++j)
            if (scores(i, j) > scores(i, best)) best = j;
        out[i] = static_cast<int>(best);
    }
    return out;
}

} // namespace rkm

#endif
