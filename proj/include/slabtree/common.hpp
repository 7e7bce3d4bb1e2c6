#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace slabtree {

using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

/// Error thrown on malformed input or violated preconditions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

inline int popcount64(u64 x) { return std::popcount(x); }

/// Number of bits needed to store values in [0..maxval]; at least 1.
inline int bit_width_for(u64 maxval) {
    int w = std::bit_width(maxval);
    return w == 0 ? 1 : w;
}

inline int floor_log2(u64 x) { return x == 0 ? 0 : std::bit_width(x) - 1; }

/// Position (0-based) of the j-th (1-based) set bit of x. popcount(x) >= j required.
inline unsigned select_in_word(u64 x, unsigned j) {
    unsigned base = 0;
    unsigned c = unsigned(std::popcount(x & 0xffffffffu));
    if (j > c) { j -= c; x >>= 32; base += 32; }
    c = unsigned(std::popcount(x & 0xffffu));
    if (j > c) { j -= c; x >>= 16; base += 16; }
    c = unsigned(std::popcount(x & 0xffu));
    if (j > c) { j -= c; x >>= 8; base += 8; }
    while (true) {
        if (x & 1) {
            if (--j == 0) return base;
        }
        x >>= 1;
        ++base;
    }
}

/// SplitMix64: the deterministic generator used by all test-data generators.
/// Constants as published by Steele, Lea & Flood; output sequence depends only
/// on the seed, so corpora reproduce across implementations.
class SplitMix64 {
public:
    explicit SplitMix64(u64 seed) : state_(seed) {}

    u64 next() {
        u64 z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, bound), bound > 0.
    u64 next_below(u64 bound) { return next() % bound; }

    /// Uniform in [lo, hi] inclusive.
    u64 next_in(u64 lo, u64 hi) { return lo + next_below(hi - lo + 1); }

    double next_unit() { return double(next() >> 11) * 0x1.0p-53; }

private:
    u64 state_;
};

} // namespace slabtree
