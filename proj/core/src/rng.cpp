#include "vibcs/rng.hpp"

#include <cmath>
#include <numbers>

namespace vibcs {

std::pair<double, double> SplitMix64::normal_pair() noexcept {
    const double u1 = uniform_open_zero();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream_id) noexcept {
    if (stream_id == 0)
        return seed;
    SplitMix64 mixer(stream_id);
    return seed ^ mixer.next();
}

} // namespace vibcs
