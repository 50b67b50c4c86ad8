// Counter-based random streams (Philox4x32-10).
//
// Every draw is a pure function of (seed, domain, stream, counter), so a
// simulation split across any number of workers reproduces the same numbers
// as a serial run. Paths use stream = path index, counter = draw index.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace hmc::rng {

using Block = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds.
[[nodiscard]] constexpr Block philox4x32(Block ctr, Key key) {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += w0;
            key[1] += w1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Named sub-streams so that e.g. oracle noise never aliases price shocks
/// even when both use the same user seed.
enum class Domain : std::uint64_t {
    prices = 1,
    oracle_noise = 2,
    garch_series = 3,
    test = 99,
};

class CounterRng {
public:
    CounterRng(std::uint64_t seed, Domain domain, std::uint64_t stream) : stream_(stream) {
        const std::uint64_t k = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(domain)));
        key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    }

    [[nodiscard]] Block block(std::uint64_t n) const {
        return philox4x32({static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n >> 32),
                           static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                          key_);
    }

    /// Two uniforms in the open interval (0,1) from block n.
    [[nodiscard]] std::array<double, 2> uniform_pair(std::uint64_t n) const {
        const Block b = block(n);
        const std::uint64_t a = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
        const std::uint64_t c = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
        constexpr double scale = 0x1.0p-53;
        return {(static_cast<double>(a >> 11) + 0.5) * scale, (static_cast<double>(c >> 11) + 0.5) * scale};
    }

    /// Standard normal number n (Box-Muller; draws 2m and 2m+1 share a block).
    [[nodiscard]] double normal(std::uint64_t n) const {
        const auto [u1, u2] = uniform_pair(n / 2);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return (n % 2 == 0) ? radius * std::cos(angle) : radius * std::sin(angle);
    }

private:
    std::uint64_t stream_;
    Key key_{};
};

/// Sequential normal draws from one stream, caching the Box-Muller pair.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, Domain domain, std::uint64_t stream) : rng_(seed, domain, stream) {}

    double operator()() {
        if (counter_ % 2 == 1) {
            ++counter_;
            return cached_;
        }
        const auto [u1, u2] = rng_.uniform_pair(counter_ / 2);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cached_ = radius * std::sin(angle);
        ++counter_;
        return radius * std::cos(angle);
    }

private:
    CounterRng rng_;
    std::uint64_t counter_ = 0;
    double cached_ = 0.0;
};

}  // namespace hmc::rng
