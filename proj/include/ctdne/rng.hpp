#pragma once

#include <cstdint>

namespace ctdne {

// Splittable counter-based generator (splitmix64 core). Independent streams
// are derived from (seed, stream index), so per-walk generators can be
// created in any order by any worker and still produce the same sequences.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed + kGolden)) {}

    static Rng split(std::uint64_t seed, std::uint64_t stream) {
        return Rng(mix(seed + kGolden * (stream + 1)));
    }

    // Hash-combines a tag and an index into a fresh seed; used to give each
    // pipeline stage its own independent stream family.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0) {
        return mix(mix(seed + kGolden * (tag + 1)) + kGolden * (index + 1));
    }

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix(state_);
    }

    // Uniform double in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), n >= 1. Multiply-shift without rejection:
    // the bias is at most n / 2^64.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace ctdne
