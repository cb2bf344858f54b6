#ifndef RKM_RNG_HPP
#define RKM_RNG_HPP

// Deterministic randomness. std::mt19937_64 is fully specified by the
// standard, but the distributions are not, so real/int mappings and the
// shuffle are spelled out here to make streams portable across toolchains.

#include <cstdint>
#include <random>
#include <vector>

namespace rkm {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform on [-1, 1).
    double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

    // Uniform integer in [0, bound) by rejection, bias-free.
    std::uint64_t uniform_index(std::uint64_t bound) {
        const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % bound;
        std::uint64_t r;
        do {
            r = gen_();
        } while (r >= limit);
        return r % bound;
    }

    // Fisher-Yates, back to front.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}
} // namespace detail

// Sub-seed for work unit (a, b) under a master seed, e.g. (combination
// index, fold index) during cross-validation. Parallel and serial sweeps
// agree because the sub-seed depends only on these identifiers.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = detail::splitmix64(master ^ detail::splitmix64(a + 0x6A09E667F3BCC909ULL));
    return detail::splitmix64(z ^ detail::splitmix64(b + 0xBB67AE8584CAA73BULL));
}

} // namespace rkm

#endif
