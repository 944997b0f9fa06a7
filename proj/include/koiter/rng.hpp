#pragma once

// Counter-based random numbers.
//
// Philox4x32-10 (Salmon et al., SC'11): a keyed bijection of a 128-bit
// counter. Every draw is a pure function of (key, counter), so streams can be
// addressed directly by (path, step, field) without any shared state.

#include <array>
#include <cstdint>
#include <utility>

namespace koiter {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept;

/// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Per-path seed: mix64(master + (path + 1) * 0x9E3779B97F4A7C15).
/// Injective in `path` for fixed `master`. These constants are part of the
/// on-disk reproducibility contract; do not change them.
std::uint64_t derive_path_seed(std::uint64_t master_seed, std::uint64_t path_index) noexcept;

/// Two independent standard normals from one Philox block (Box-Muller).
std::pair<double, double> standard_normal_pair(std::uint64_t seed, std::uint64_t step, std::uint32_t stream) noexcept;

} // namespace koiter
