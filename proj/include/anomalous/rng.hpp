#pragma once

#include <cstdint>

namespace anomalous {

// Deterministic splitmix64 generator.  We deliberately avoid
// std::uniform_int_distribution (implementation-defined sequences) so that
// scans are reproducible across standard libraries and worker counts.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform value in [0, n) by rejection sampling; n >= 1.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
        for (;;) {
            std::uint64_t v = next();
            if (v < limit) return v % n;
        }
    }

    bool coin() { return next() & 1; }

private:
    std::uint64_t state_;
};

// Stable mixing of a global seed with per-prime / per-purpose tags, so each
// prime's randomized subcomputations are independent of scan scheduling.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t p, std::uint64_t tag) {
    std::uint64_t h = seed ^ 0x8f1bbcdcbfa53e0bULL;
    for (std::uint64_t v : {p, tag}) {
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdULL;
        h ^= h >> 33;
    }
    return h;
}

}  // namespace anomalous
