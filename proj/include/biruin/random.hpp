#pragma once

#include <cstdint>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

namespace biruin {

// SplitMix64 finalizer (Stafford variant 13). Full avalanche: flipping any
// input bit flips each output bit with probability close to 1/2.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed for substream `index` of `seed`. Chained so that (seed, index) pairs
// never collide through simple addition.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// A single reproducible random stream.
///
/// Everything random in the library is drawn through one of these, so a
/// (seed, call sequence) pair fully determines every result. Streams are
/// cheap to construct and are never shared between threads.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    RandomStream(std::uint64_t seed, std::uint64_t index)
        : RandomStream(derive_seed(seed, index)) {}

    /// Uniform on the open interval (0, 1); 53 random bits, never 0 or 1.
    double uniform() noexcept {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal (ziggurat).
    double normal() { return normal_(engine_); }

    boost::random::mt19937_64& engine() noexcept { return engine_; }

private:
    boost::random::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace biruin
