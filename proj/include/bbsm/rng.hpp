#pragma once

#include <cstdint>

#include "bbsm/normal.hpp"

namespace bbsm {

/// Counter-based random stream: every variate is a pure function of
/// (seed, path, step), so results do not depend on how paths are batched
/// across threads.
class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

    constexpr std::uint64_t bits(std::uint64_t path, std::uint64_t step) const noexcept {
        std::uint64_t h = mix(seed_ ^ 0x243F6A8885A308D3ULL);
        h = mix(h + (path + 1) * 0x9E3779B97F4A7C15ULL);
        h = mix(h ^ ((step + 1) * 0xD1B54A32D192ED03ULL));
        return h;
    }

    /// Uniform on the open interval (0, 1).
    constexpr double uniform(std::uint64_t path, std::uint64_t step) const noexcept {
        return (static_cast<double>(bits(path, step) >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal(std::uint64_t path, std::uint64_t step) const noexcept {
        return norm_inv(uniform(path, step));
    }

    constexpr std::uint64_t seed() const noexcept { return seed_; }

private:
    // SplitMix64 finalizer.
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
};

}  // namespace bbsm
