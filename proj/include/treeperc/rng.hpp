#pragma once

#include <cstdint>
#include <limits>

namespace treeperc {

/// Run seed plus a sub-stream identifier. Trials draw from
/// trial_engine(seed, trial), so identical (seed, stream, trial) reproduce
/// identical samples regardless of how trials are split across workers.
struct Seed {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    /// Independent sub-stream for a named sub-computation.
    [[nodiscard]] Seed child(std::uint64_t tag) const;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256** (Blackman and Vigna), seeded through splitmix64.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) {
        for (auto& word : s_) {
            word = splitmix64(seed);
        }
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

/// Engine for one trial of one stream.
Xoshiro256 trial_engine(Seed seed, std::uint64_t trial);

}  // namespace treeperc
