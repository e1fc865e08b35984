#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace relaysim {

/// Independent pseudo-random stream. Streams are keyed by a master seed and a
/// list of counters (frame index, link id, ...), so any frame can be replayed
/// in isolation and concurrent workers never share generator state.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    static RandomStream derive(std::uint64_t master_seed,
                               std::initializer_list<std::uint64_t> counters);

    /// Uniform on [0, 1).
    double uniform();
    /// Standard normal.
    double normal();
    /// A fair coin as 0/1.
    std::uint8_t bit();

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer; used to mix counters into stream seeds.
std::uint64_t mix64(std::uint64_t x);

} // namespace relaysim
