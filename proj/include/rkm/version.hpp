#ifndef RKM_VERSION_HPP
#define RKM_VERSION_HPP

namespace rkm {

inline constexpr const char* library_name = "rkmbench";
inline constexpr const char* library_version = "1.0.0";

// Identity of the deterministic random stream: generator, real mapping,
// shuffle, and sub-seed derivation. Recorded in every report so results
// can be replicated across platforms.
inline constexpr const char* rng_identity =
    "mt19937_64; uniform[-1,1] via (x>>11)*2^-53; Fisher-Yates with "
    "rejection sampling; splitmix64 sub-seed derivation";

} // namespace rkm

#endif
