#pragma once

#include <cstdint>
#include <string_view>

namespace scholrel {

// Counter-based pseudo-random generator. Each (seed, stream) pair yields an
// independent deterministic sequence, so per-email / per-paper draws do not
// depend on iteration order and are safe to compute in parallel.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::string_view stream)
        : key_(finalize(seed ^ fnv1a(stream))) {}

    explicit CounterRng(std::uint64_t seed) : key_(finalize(seed)) {}

    std::uint64_t next_u64() {
        // splitmix64 sequence anchored at key_
        return finalize(key_ + kGolden * ++counter_);
    }

    /// Uniform draw in [0, 1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform draw in [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t finalize(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace scholrel
