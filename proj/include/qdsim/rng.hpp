#pragma once

#include <cstdint>
#include <random>

namespace qd {

// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
// Used instead of std::uniform_real_distribution, whose output sequence is
// not pinned down by the standard; this keeps runs identical across
// toolchains for a given seed.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * uniform01(gen);
}

} // namespace qd
