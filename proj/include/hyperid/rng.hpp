#pragma once

#include <cstdint>
#include <string_view>

namespace hyperid {

/// Counter-based 64-bit generator: draw k is the SplitMix64 finalizer applied
/// to seed + (k+1) * golden_gamma, so any draw is addressable from (seed, k).
class CounterRng {
public:
    static constexpr std::string_view kName = "splitmix64-counter/box-muller";

    explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

    std::uint64_t next_u64() noexcept;
    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;
    /// Standard normal by the Box-Muller transform.
    double gaussian() noexcept;
    bool coin() noexcept { return (next_u64() >> 63) != 0; }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64_mix(std::uint64_t x) noexcept;

/// Per-trial seed hash(base, index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

}  // namespace hyperid
