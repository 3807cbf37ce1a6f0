#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace infctl {

/// Philox4x32-10 (Salmon et al., SC'11). Stateless: the output is a pure
/// function of (key, counter), so every path and step can be addressed
/// directly without sharing generator state between workers.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, key);
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53U;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57U;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9U;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85U;

    static Counter single_round(const Counter& c, const Key& k) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// Standard normal draws keyed by (seed, stream, index). Consecutive even/odd
/// indices share one Philox block and one Box-Muller transform.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    [[nodiscard]] double at(std::uint64_t index) {
        const std::uint64_t block = index >> 1;
        if (block != cached_block_) {
            fill(block);
            cached_block_ = block;
        }
        return cache_[index & 1U];
    }

private:
    void fill(std::uint64_t block) {
        const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block),
                                      static_cast<std::uint32_t>(block >> 32),
                                      static_cast<std::uint32_t>(stream_),
                                      static_cast<std::uint32_t>(stream_ >> 32)};
        const auto out = Philox4x32::generate(ctr, key_);
        // 53-bit uniforms in (0, 1] and [0, 1).
        const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 21) ^ (out[1] >> 11);
        const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 21) ^ (out[3] >> 11);
        constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
        const double u1 = (static_cast<double>(a & ((1ULL << 53) - 1)) + 1.0) * kScale;
        const double u2 = static_cast<double>(b & ((1ULL << 53) - 1)) * kScale;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cache_[0] = radius * std::cos(angle);
        cache_[1] = radius * std::sin(angle);
    }

    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t cached_block_ = ~0ULL;
    std::array<double, 2> cache_{};
};

}  // namespace infctl
