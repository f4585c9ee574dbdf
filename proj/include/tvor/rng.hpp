#pragma once

#include <cstdint>

namespace tvor {

// All randomness flows through SplitMix64 (Steele, Lea & Flood 2014), a
// counter-based generator: output i is a fixed 64-bit hash of
// state0 + (i+1)*GAMMA. Identical (base, stream) pairs reproduce identical
// draws on every platform and under any thread schedule.
struct RngSeed {
    std::uint64_t base = 0;
    std::uint64_t stream = 0;
};

namespace detail {
inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace detail

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}
    explicit SplitMix64(RngSeed seed)
        : state_(detail::mix64(seed.base + detail::kGolden * (seed.stream + 1))) {}

    std::uint64_t next_u64() {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Unbiased integer in [0, bound) via rejection (Lemire 2019).
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        __uint128_t m = static_cast<__uint128_t>(next_u64()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            std::uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                m = static_cast<__uint128_t>(next_u64()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t state_;
};

// Derives an independent stream by folding extra indices into the stream id.
// Used to give each (trial, histogram, purpose) its own reproducible stream.
inline RngSeed derive(RngSeed seed, std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0) {
    std::uint64_t s = seed.stream;
    s = detail::mix64(s + detail::kGolden * (a + 1));
    s = detail::mix64(s + detail::kGolden * (b + 1));
    s = detail::mix64(s + detail::kGolden * (c + 1));
    return RngSeed{seed.base, s};
}

} // namespace tvor
