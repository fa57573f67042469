#pragma once

#include <cstdint>
#include <utility>

namespace vibcs {

/// SplitMix64 generator. Every random quantity in the library is derived
/// from this stream with fully specified integer-to-real conversions so that
/// matrices and synthetic signals regenerate bit-identically from a seed.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0, 1]; safe as a logarithm argument.
    double uniform_open_zero() noexcept {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound) by the multiply-high reduction
    /// (no rejection, so the number of draws is fixed). `bound` must be > 0.
    std::uint64_t bounded(std::uint64_t bound) noexcept {
        __extension__ using Wide = unsigned __int128;
        const Wide wide = static_cast<Wide>(next()) * bound;
        return static_cast<std::uint64_t>(wide >> 64);
    }

    /// Top bit of the next draw.
    bool bit() noexcept { return (next() >> 63) != 0; }

    /// Box-Muller: one (0,1] uniform and one [0,1) uniform produce two
    /// independent standard normals.
    std::pair<double, double> normal_pair() noexcept;

private:
    std::uint64_t state_;
};

/// Streams of standard normals; the pair from Box-Muller is consumed in order.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) noexcept : rng_(seed) {}

    double next() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        auto [z0, z1] = rng_.normal_pair();
        spare_ = z1;
        has_spare_ = true;
        return z0;
    }

private:
    SplitMix64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Seed for an independent stream derived from a user seed. Stream 0 is the
/// seed itself (measurement matrices); other ids are hashed through the
/// SplitMix64 finalizer so streams never share state.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream_id) noexcept;

inline constexpr std::uint64_t kNoiseStream = 0x6E6F697365ULL; // "noise"

} // namespace vibcs
