#pragma once

#include "vibcs/signal.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace vibcs {

struct Tone {
    double frequency_hz = 0.0;
    double amplitude = 1.0;
    double phase_rad = 0.0;
};

/// One-sided decaying exponential amplitude * exp(-decay * (t - position)).
struct Impulse {
    std::size_t position = 0;
    double amplitude = 1.0;
    double decay_per_sample = 0.5;
};

struct SynthSpec {
    std::size_t n = 1024;
    double sample_rate_hz = 20000.0;
    std::vector<Tone> tones;
    /// White-noise power in dB relative to the strongest tone's power
    /// (a^2 / 2), or relative to unit power when there are no tones.
    double noise_db = -std::numeric_limits<double>::infinity();
    std::vector<Impulse> impulses;
    std::uint64_t seed = 0;
};

/// Deterministic tone mixture + white noise + impulses. Throws
/// ErrorKind::parameter for aliased tones (f >= fs / 2), n < 2, or a
/// non-positive sample rate.
Signal generate(const SynthSpec& spec);

} // namespace vibcs
