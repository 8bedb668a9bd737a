#include "treeperc/rng.hpp"

namespace treeperc {

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t state = a ^ (b * 0xD1B54A32D192ED03ULL);
    const std::uint64_t first = splitmix64(state);
    return first ^ splitmix64(state);
}

}  // namespace

Seed Seed::child(std::uint64_t tag) const { return {seed, mix(stream + 0x632BE59BD9B4E019ULL, tag)}; }

Xoshiro256 trial_engine(Seed seed, std::uint64_t trial) {
    return Xoshiro256(mix(mix(seed.seed, seed.stream), trial));
}

}  // namespace treeperc
