#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace graphband {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// A single random stream. The raw mt19937_64 output sequence is pinned by
// the standard and every draw helper below is hand-rolled, so replays are
// byte-exact on any platform (std::*_distribution gives no such promise).
//
// Streams are derived from (seed, label); components of a simulation each
// get their own label ("env", "gen", "wilson", "learner") so that, e.g.,
// changing the arm count cannot perturb the context sequence.
class Rng {
public:
    Rng() : engine_(0x853c49e6748fea9bULL) {}
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    static Rng stream(std::uint64_t seed, std::string_view label) {
        return Rng(splitmix64(seed ^ fnv1a64(label)));
    }

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [0, bound), bound >= 1; rejection sampling, no modulo bias
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (-bound) % bound;  // 2^64 mod bound
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x < threshold);
        return x % bound;
    }

    // 1-based index in [1, n]
    int next_index(int n) { return static_cast<int>(next_below(static_cast<std::uint64_t>(n))) + 1; }

    bool bernoulli(double p) { return next_double() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace graphband
