#pragma once

#include <cstdint>

namespace depauw {

// splitmix64: deterministic across platforms, cheap to seed per path.
struct SplitMix64 {
    uint64_t state = 0;

    explicit SplitMix64(uint64_t seed = 0) : state(seed) {}

    uint64_t next()
    {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return next() % n; }
};

// Independent stream for item `index` under a master seed; scheduling-order
// independent by construction.
inline SplitMix64 stream_for(uint64_t seed, uint64_t index)
{
    SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ull * (index + 0x632be59bd9b4e019ull)));
    g.next();
    return g;
}

}  // namespace depauw
