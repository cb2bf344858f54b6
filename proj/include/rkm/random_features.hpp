#ifndef RKM_RANDOM_FEATURES_HPP
#define RKM_RANDOM_FEATURES_HPP

// Frozen random hidden layer: uniform [-1,1] weights and per-node biases,
// plus the activation applied to X*W + b.

#include <cstdint>
#include <vector>

#include "rkm/activations.hpp"
#include "rkm/errors.hpp"
#include "rkm/matrix.hpp"
#include "rkm/rng.hpp"

namespace rkm {

struct RandomLayer {
    DenseMatrix weights;        // input_dim x hidden_nodes
    std::vector<double> biases; // one per hidden node, broadcast over samples
    Activation activation = Activation::sigmoid;
    std::uint64_t seed = 0;

    std::size_t input_dim() const { return weights.rows; }
    std::size_t hidden_nodes() const { return weights.cols; }
};

// Draw order is fixed: all weights row-major, then the biases. Same
// (input_dim, hidden_nodes, seed) reproduces identical entries.
inline RandomLayer init_layer(std::size_t input_dim, std::size_t hidden_nodes,
                              Activation activation, std::uint64_t seed) {
    if (input_dim == 0 || hidden_nodes == 0)
        throw InputError("init_layer: dimensions must be positive");
    RandomLayer layer;
    layer.weights = DenseMatrix(input_dim, hidden_nodes);
    layer.biases.resize(hidden_nodes);
    layer.activation = activation;
    layer.seed = seed;
    Rng rng(seed);
    for (double& w : layer.weights.data) w = rng.uniform_pm1();
    for (double& b : layer.biases) b = rng.uniform_pm1();
    return layer;
}

// H(i,j) = activate(x_i . w_j + b_j), an n x hidden_nodes matrix.
inline DenseMatrix transform(const RandomLayer& layer, const DenseMatrix& x) {
    if (x.cols != layer.input_dim())
        throw InputError("transform: input has " + std::to_string(x.cols) +
                         " features, layer expects " + std::to_string(layer.input_dim()));
    DenseMatrix h = matmul(x, layer.weights);
    for (std::size_t i = 0; i < h.rows; ++i)
        for (std::size_t j = 0; j < h.cols; ++j)
            h(i, j) = activate(layer.activation, h(i, j) + layer.biases[j]);
    return h;
}

} // namespace rkm

#endif
