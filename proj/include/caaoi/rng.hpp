#pragma once

#include <cstdint>
#include <string_view>

namespace caaoi {

/// SplitMix64 output function. Fixed for golden tests; do not change.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based stream: the k-th draw is mix64(key + k * golden_gamma). Two
/// streams with different keys are statistically independent, and a stream
/// can be recreated at any position from (key, counter).
class RngStream {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    RngStream() = default;
    explicit RngStream(std::uint64_t key) : key_(key) {}

    std::uint64_t next() { return mix64(key_ + (++counter_) * kGamma); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

/// Named substream purposes. Values are part of the stream contract.
enum class StreamTag : std::uint64_t {
    Channel = 1,
    Policy = 2,
    SystemGen = 3,
    Replication = 4,
};

/// Derives a substream key from a master seed and up to two indices, e.g.
/// (seed, Channel, replication, sensor).
std::uint64_t derive_key(std::uint64_t master_seed, StreamTag tag, std::uint64_t a = 0,
                         std::uint64_t b = 0);

inline RngStream substream(std::uint64_t master_seed, StreamTag tag, std::uint64_t a = 0,
                           std::uint64_t b = 0) {
    return RngStream(derive_key(master_seed, tag, a, b));
}

} // namespace caaoi
