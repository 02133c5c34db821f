#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace rlscape {

// splitmix64 step (Steele/Lea/Flood; Vigna's fixed-increment variant).
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stateless scramble of a 64-bit value (splitmix64 finalizer).
inline std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Deterministic random stream with named and indexed splitting.
//
// A stream is identified by its seed; consuming values advances a separate
// position state. Children are derived from the parent *seed*, never from
// the position, so a split is a pure function of (seed, label):
//
//   named:    child_seed = mix64(seed ^ fnv1a64(label))
//   indexed:  child_seed = mix64(seed ^ mix64(index + 0x9E3779B97F4A7C15))
//
// Every stochastic operation in the library draws from a stream derived
// this way from a single experiment seed; nothing reads a global generator.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    // Uniform integer in [0, n). n must be > 0. Modulo bias is below 2^-40
    // for all n used here (n << 2^64); accepted for speed and portability.
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    // Standard normal via Box-Muller (cosine branch). Consumes two values;
    // the sine companion is discarded so one draw is always two steps of the
    // underlying stream.
    double normal() {
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0,1]
        const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;        // [0,1)
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    RngStream split(std::string_view label) const {
        return RngStream(mix64(seed_ ^ fnv1a64(label)));
    }

    RngStream split(std::uint64_t index) const {
        return RngStream(mix64(seed_ ^ mix64(index + 0x9E3779B97F4A7C15ULL)));
    }

    RngStream split(std::string_view label, std::uint64_t index) const {
        return split(label).split(index);
    }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

// Convenience for deriving a child seed without constructing streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
    return mix64(seed ^ fnv1a64(label));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index) {
    return mix64(derive_seed(seed, label) ^ mix64(index + 0x9E3779B97F4A7C15ULL));
}

}  // namespace rlscape
