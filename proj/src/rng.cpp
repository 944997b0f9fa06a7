#include "koiter/rng.hpp"

#include <cmath>
#include <numbers>

namespace koiter {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept
{
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

} // namespace

PhiloxCounter philox4x32_10(PhiloxCounter x, PhiloxKey k) noexcept
{
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, x[0], hi0, lo0);
        mulhilo(kMul1, x[2], hi1, lo1);
        x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return x;
}

std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t derive_path_seed(std::uint64_t master_seed, std::uint64_t path_index) noexcept
{
    return mix64(master_seed + (path_index + 1) * 0x9E3779B97F4A7C15ull);
}

std::pair<double, double> standard_normal_pair(std::uint64_t seed, std::uint64_t step, std::uint32_t stream) noexcept
{
    const PhiloxKey key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    const PhiloxCounter ctr{static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32), stream, 0u};
    const PhiloxCounter r = philox4x32_10(ctr, key);
    const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
    constexpr double inv53 = 1.0 / 9007199254740992.0; // 2^-53
    const double u1 = (static_cast<double>(a >> 11) + 0.5) * inv53; // (0, 1)
    const double u2 = static_cast<double>(b >> 11) * inv53;         // [0, 1)
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    return {rad * std::cos(ang), rad * std::sin(ang)};
}

} // namespace koiter
