#pragma once

#include <cstdint>

namespace dsice {

enum class Shock : std::uint64_t { Chi = 1, Zeta = 2, Tipping = 3 };

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based uniform in [0, 1) keyed by (seed, path, t, shock), so a draw
// does not depend on the order in which paths are simulated.
inline double uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t t, Shock shock) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ path);
    h = splitmix64(h ^ (t << 2 | static_cast<std::uint64_t>(shock)));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Index drawn from a discrete distribution given by `n` probabilities.
inline int draw_index(const double* probs, int n, double u) {
    double acc = 0.0;
    for (int k = 0; k < n - 1; ++k) {
        acc += probs[k];
        if (u < acc) return k;
    }
    return n - 1;
}

}  // namespace dsice
