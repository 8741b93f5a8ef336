#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace wavetrack {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Counter-based random stream: draw i is mix64(key + i * golden).
/// split(n) derives an independent child key; no global state.
class RngStream {
public:
    explicit RngStream(std::uint64_t key = 0) noexcept : key_(key) {}

    std::uint64_t next_u64() noexcept { return mix64(key_ + 0x9E3779B97F4A7C15ull * counter_++); }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal, Box-Muller (two draws per value; the sine branch is discarded).
    double normal() noexcept {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    RngStream split(std::uint64_t child) const noexcept { return RngStream(mix64(key_ ^ mix64(child + 0x51ED27ull))); }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace wavetrack
