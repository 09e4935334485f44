// ensemble.hpp — deterministic sampling of random compact potentials.
// splitmix64 keeps ensembles byte-identical across platforms and build modes
// (std::mt19937 distributions are not portable).

#pragma once

#include <cstdint>

#include "dsch/lattice.hpp"

namespace dsch {

struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    int uniform_int(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1));
    }
};

// Compact potential: support length 1..max_support placed near the origin,
// entries uniform in [-amplitude, amplitude].
inline Potential random_compact_potential(SplitMix64& rng, int max_support = 9, double amplitude = 1.0) {
    int len = rng.uniform_int(1, max_support);
    int hi_off = 4 - (len - 1);
    int offset = rng.uniform_int(-4, hi_off < -4 ? -4 : hi_off);
    std::vector<double> vals(static_cast<size_t>(len));
    for (double& v : vals) v = rng.uniform(-amplitude, amplitude);
    return Potential(offset, std::move(vals));
}

}  // namespace dsch
