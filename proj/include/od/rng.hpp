#pragma once

#include <cmath>
#include <cstdint>

namespace od {

/// Deterministic 64-bit generator (splitmix64). The stream for a given seed is
/// identical on every platform, which keeps generated files byte-stable.
/// Record-scoped streams are derived from (seed, ordinal) so inserting a
/// record never reshuffles the draws of the others.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    static Rng for_stream(uint64_t seed, uint64_t ordinal) {
        // one splitmix step decorrelates seed and ordinal before mixing
        Rng r(seed ^ (0x9e3779b97f4a7c15ULL * (ordinal + 1)));
        r.next();
        return r;
    }

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Rejection keeps the draw exactly uniform.
    int64_t below(int64_t n) {
        const uint64_t un = static_cast<uint64_t>(n);
        const uint64_t limit = UINT64_MAX - UINT64_MAX % un;
        uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return static_cast<int64_t>(v % un);
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Poisson draw by Knuth's product method; large means split in half so
    /// exp(-lambda) never underflows.
    int64_t poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        if (lambda > 50.0) return poisson(lambda / 2.0) + poisson(lambda / 2.0);
        const double limit = std::exp(-lambda);
        int64_t k = 0;
        double prod = 1.0;
        do {
            ++k;
            prod *= uniform();
        } while (prod > limit);
        return k - 1;
    }

private:
    uint64_t state_;
};

} // namespace od
