#pragma once

#include <cstdint>
#include <limits>

namespace hdclt {

/// SplitMix64 finalizer; a bijective 64-bit mixing function.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Key of the stream with index `index` under `master`. Pure function, so a
/// replicate's randomness does not depend on which worker runs it or when.
[[nodiscard]] constexpr std::uint64_t derive(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(mix64(master ^ 0x6A09E667F3BCC909ULL) + mix64(index + 0x9E3779B97F4A7C15ULL));
}

/**
 * Counter-based 64-bit generator: the i-th output is mix64(key + (i+1)·γ).
 *
 * Satisfies UniformRandomBitGenerator, so it plugs into the <random>
 * distributions. Streams are identified by their key; use derive() to split.
 */
class Stream {
public:
    using result_type = std::uint64_t;

    explicit constexpr Stream(std::uint64_t key) noexcept : key_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        counter_ += 0x9E3779B97F4A7C15ULL;
        return mix64(key_ + counter_);
    }

    /// Child stream; does not advance this one.
    [[nodiscard]] constexpr Stream split(std::uint64_t index) const noexcept {
        return Stream(derive(key_, index));
    }

    [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace hdclt
