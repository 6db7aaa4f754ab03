#pragma once

#include <array>
#include <cstdint>

namespace triwalk {

/// splitmix64 step: advances the state by the golden-ratio increment and
/// returns a mixed output. Used both as a seed expander and as the
/// documented per-path seed mix.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ with splitmix64 seeding. Path streams are part of the
/// reproducibility contract: path i draws from a generator seeded with
/// master_seed ^ (i + 1) * 0x9E3779B97F4A7C15, expanded by four
/// splitmix64 outputs.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
    }

    static Xoshiro256pp for_path(std::uint64_t master_seed, std::uint64_t path_index) {
        return Xoshiro256pp(master_seed ^ (path_index + 1) * 0x9E3779B97F4A7C15ULL);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> state_{};
};

}  // namespace triwalk
