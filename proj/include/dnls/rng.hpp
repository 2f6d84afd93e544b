// Seeded random streams. Per-chain streams are derived from a master seed
// by hashing (master, stream_id) through SplitMix64, so any number of
// concurrent chains get decorrelated, reproducible generators.
#pragma once

#include <cstdint>
#include <random>

namespace dnls {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Stream splitting rule: state = master_seed, advance stream_id + 1 times
/// through SplitMix64; the outputs seed a mt19937_64.
inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t s = master_seed;
    std::uint64_t out = 0;
    for (std::uint64_t i = 0; i <= stream_id; ++i) out = detail::splitmix64(s);
    std::seed_seq seq{std::uint32_t(out), std::uint32_t(out >> 32),
                      std::uint32_t(stream_id), std::uint32_t(master_seed)};
    return std::mt19937_64(seq);
}

}  // namespace dnls
