#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace ncolab::core {

/// 64-bit FNV-1a. Stable across platforms, used for config and file hashes.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t h);

/// Independent generator for (seed, stream label, index). Streams with
/// different labels or indices never share state, so work split across
/// threads draws the same numbers as a serial run.
std::mt19937_64 make_stream(std::uint64_t seed, std::string_view label,
                            std::uint64_t index = 0);

/// Seconds on a monotonic clock.
double now_seconds();

}  // namespace ncolab::core
