#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include <boost/random/normal_distribution.hpp>

#include "vcma/vec3.hpp"

namespace vcma {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// A block is a pure function of (counter, key), so any trial's stream can be
/// reproduced without touching any other trial's state.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter block(Counter ctr, Key key)
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Child seed for index `index` under `parent`. Used for both per-point and
/// per-trial derivation so that results never depend on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index)
{
    return mix64(mix64(parent) ^ mix64(index ^ 0x6A09E667F3BCC909ull));
}

/// 64-bit UniformRandomBitGenerator over one Philox key. Block i of the
/// stream is Philox(counter = i, key), so the stream is fully determined by
/// its seed.
class PhiloxEngine {
public:
    using result_type = std::uint64_t;

    explicit PhiloxEngine(std::uint64_t stream_seed)
        : key_{static_cast<std::uint32_t>(stream_seed), static_cast<std::uint32_t>(stream_seed >> 32)}
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()()
    {
        if (lane_ == 2) {
            refill();
        }
        return buffer_[lane_++];
    }

    std::uint64_t blocks_used() const { return counter_; }

private:
    void refill()
    {
        const auto out = Philox4x32::block(
            {static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32), 0u, 0u}, key_);
        ++counter_;
        buffer_[0] = (std::uint64_t{out[0]} << 32) | out[1];
        buffer_[1] = (std::uint64_t{out[2]} << 32) | out[3];
        lane_ = 0;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int lane_ = 2;
};

/// Standard normal and uniform variates for one trial.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t stream_seed) : engine_(stream_seed) {}

    double next() { return normal_(engine_); }

    Vec3 next_vec3()
    {
        const double a = next();
        const double b = next();
        const double c = next();
        return {a, b, c};
    }

    /// Uniform on the open interval (0, 1).
    double uniform()
    {
        const std::uint64_t bits = engine_() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

private:
    PhiloxEngine engine_;
    boost::random::normal_distribution<double> normal_;
};

} // namespace vcma
