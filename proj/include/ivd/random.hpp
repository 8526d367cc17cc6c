#pragma once

// Seeded, platform-independent random streams. Every draw is a pure function
// of the seed, so experiments are bit-reproducible.

#include <cstdint>
#include <random>

namespace ivd {

using RngSeed = std::uint64_t;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for trial `index` of an experiment seeded with `master`.
constexpr RngSeed derive_seed(RngSeed master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

class Rng {
  public:
    explicit Rng(RngSeed seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t v;
        do v = engine_(); while (v >= limit);
        return v % n;
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace ivd
