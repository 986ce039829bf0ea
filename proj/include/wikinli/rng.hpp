#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace wikinli {

// Deterministic PRNG used for every seeded operation in the pipeline.
// std::mt19937 + distributions are not portable across standard library
// implementations, so splits, shuffles and baselines all go through this
// engine to keep manifests byte-identical everywhere.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, bound) by rejection sampling.
    uint64_t below(uint64_t bound) {
        if (bound <= 1) return 0;
        const uint64_t threshold = -bound % bound;  // 2^64 mod bound
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// FNV-1a over the tag, mixed with the run seed. Gives each (seed, label)
// pair its own independent stream, e.g. one per class during splitting.
inline uint64_t derive_seed(uint64_t seed, std::string_view tag) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h ^ (seed * 0x9E3779B97F4A7C15ULL);
}

// Fisher-Yates with the portable engine above.
template <class T>
void deterministic_shuffle(std::vector<T>& v, SplitMix64& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.below(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace wikinli
