#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace gccp {

inline constexpr std::uint64_t fnv_offset_basis = 14695981039346656037ULL;
inline constexpr std::uint64_t fnv_prime = 1099511628211ULL;

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t state = fnv_offset_basis) noexcept
{
    for (unsigned char c : bytes) {
        state ^= c;
        state *= fnv_prime;
    }
    return state;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31U);
}

/// Maps a 64-bit value to [0, 1) using the top 53 bits.
constexpr double unit_interval(std::uint64_t x) noexcept
{
    return static_cast<double>(x >> 11U) * 0x1.0p-53;
}

/// Standard normal deviate via Box-Muller from a 64-bit key.
double keyed_normal(std::uint64_t key) noexcept;

std::string hex64(std::uint64_t x);
std::string sha256_hex(std::string_view bytes);

}  // namespace gccp
