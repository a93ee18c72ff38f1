#pragma once

#include <cstdint>

namespace randdiv {

/// SplitMix64 finalizer. Used both as a seed mixer and as a counter-based stream.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double uniform01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Platform-independent stream; std:: distributions are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed)) {}

    std::uint64_t next() { return splitmix64(state_++); }
    double uniform() { return uniform01(next()); }
    std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * n) % n; }

private:
    std::uint64_t state_;
};

}  // namespace randdiv
