#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gridsim {

/// splitmix64 finalizer; used to derive independent sub-stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_name(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Seed for the named sub-stream of `seed` (platform, workload, failures, ...).
constexpr std::uint64_t substream(std::uint64_t seed, std::string_view name) {
    return mix64(seed ^ mix64(hash_name(name)));
}

/// Deterministic generator. The standard distributions are implementation
/// defined, so all draws go through the helpers below, which only rely on
/// the bit-exact output of mt19937_64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi]; returns lo when the range is degenerate.
    double uniform(double lo, double hi) {
        if (!(hi > lo)) return lo;
        double v = lo + (hi - lo) * unit();
        return v > hi ? hi : v;
    }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        // Rejection sampling keeps the draw unbiased.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    /// Exponential with the given rate.
    double exponential(double rate);

private:
    std::mt19937_64 engine_;
};

}  // namespace gridsim
