#pragma once

#include <cstdint>

namespace hypercurv {

// Counter-based generator: draw i of a stream is a pure function of
// (key, i), so substreams can be handed to independent trials without any
// shared state. The mixing function is the SplitMix64 finalizer.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_(mix(seed ^ mix(stream + kGamma))) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() noexcept { return mix(key_ + (++counter_) * kGamma); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Independent child stream; does not advance this generator.
    CounterRng substream(std::uint64_t id) const noexcept { return CounterRng(key_, id + 1); }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace hypercurv
