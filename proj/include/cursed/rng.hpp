#pragma once

#include <cstdint>

namespace cursed {

/// SplitMix64 (Steele, Lea, Flood 2014) with the published constants.
class SplitMix64 {
public:
    constexpr explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    constexpr std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

/// One draw from the stream keyed by (seed, a, b). Each key component
/// reseeds the generator from the previous output.
constexpr std::uint64_t keyed_draw(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
    SplitMix64 g{seed};
    std::uint64_t h = g.next();
    g = SplitMix64{h ^ a};
    h = g.next();
    g = SplitMix64{h ^ b};
    return g.next();
}

} // namespace cursed
