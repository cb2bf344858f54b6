#ifndef RKM_ACTIVATIONS_HPP
#define RKM_ACTIVATIONS_HPP

#include <cmath>
#include <string>

#include "rkm/errors.hpp"

namespace rkm {

// The nine supported hidden-layer activations, indexed 1..9.
enum class Activation : int {
    selu = 1,
    relu = 2,
    sigmoid = 3,
    sine = 4,
    hardlim = 5,
    tribas = 6,
    radbas = 7,
    sign = 8,
    leaky_relu = 9,
};

inline constexpr int activation_count = 9;

inline Activation activation_from_index(int idx) {
    if (idx < 1 || idx > activation_count)
        throw InputError("activation index out of range: " + std::to_string(idx));
    return static_cast<Activation>(idx);
}

inline const char* activation_name(Activation a) {
    switch (a) {
        case Activation::selu: return "selu";
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
        case Activation::sine: return "sine";
        case Activation::hardlim: return "hardlim";
        case Activation::tribas: return "tribas";
        case Activation::radbas: return "radbas";
        case Activation::sign: return "sign";
        case Activation::leaky_relu: return "leaky_relu";
    }
    throw InputError("unknown activation");
}

inline Activation activation_from_name(const std::string& s) {
    for (int i = 1; i <= activation_count; ++i) {
        const Activation a = static_cast<Activation>(i);
        if (s == activation_name(a)) return a;
    }
    throw InputError("unknown activation name: " + s);
}

inline double activate(Activation kind, double x) {
    switch (kind) {
        case Activation::selu: {
            constexpr double s = 1.05070098;
            constexpr double alpha = 1.67326324;
            return x > 0.0 ? s * x : s * alpha * (std::exp(x) - 1.0);
        }
        case Activation::relu: return x > 0.0 ? x : 0.0;
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case Activation::sine: return std::sin(x);
        case Activation::hardlim: return x >= 0.0 ? 1.0 : 0.0;
        case Activation::tribas: return std::max(0.0, 1.0 - std::abs(x));
        case Activation::radbas: return std::exp(-x * x);
        case Activation::sign: return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
        case Activation::leaky_relu: return x > 0.0 ? x : 0.01 * x;
    }
    throw InputError("unknown activation");
}

} // namespace rkm

#endif
