#include "vibcs/synth.hpp"

#include "vibcs/error.hpp"
#include "vibcs/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace vibcs {

Signal generate(const SynthSpec& spec) {
    if (spec.n < 2)
        throw Error(ErrorKind::parameter, "synthetic signal needs n >= 2");
    if (!(spec.sample_rate_hz > 0.0) || !std::isfinite(spec.sample_rate_hz))
        throw Error(ErrorKind::parameter, "sample rate must be positive");
    const double nyquist = spec.sample_rate_hz / 2.0;
    double reference_power = 0.0;
    for (const auto& tone : spec.tones) {
        if (!(tone.frequency_hz >= 0.0 && tone.frequency_hz < nyquist))
            throw Error(ErrorKind::parameter, "tone at " + std::to_string(tone.frequency_hz) +
                                                  " Hz aliases at fs=" +
                                                  std::to_string(spec.sample_rate_hz) + " Hz");
        reference_power = std::max(reference_power, tone.amplitude * tone.amplitude / 2.0);
    }
    if (spec.tones.empty())
        reference_power = 1.0;

    Signal out;
    out.sample_rate_hz = spec.sample_rate_hz;
    out.source = "synth:seed=" + std::to_string(spec.seed);
    out.samples.assign(spec.n, 0.0);
    auto& x = out.samples;

    for (const auto& tone : spec.tones) {
        for (std::size_t t = 0; t < spec.n; ++t) {
            // Reduce f*t modulo fs first so exact-bin tones stay exact at large t.
            const double cycles = std::fmod(tone.frequency_hz * static_cast<double>(t),
                                            spec.sample_rate_hz) / spec.sample_rate_hz;
            x[t] += tone.amplitude * std::cos(2.0 * std::numbers::pi * cycles + tone.phase_rad);
        }
    }

    if (spec.noise_db != -std::numeric_limits<double>::infinity()) {
        if (!std::isfinite(spec.noise_db))
            throw Error(ErrorKind::parameter, "noise level must be finite or -inf");
        const double sigma = std::sqrt(reference_power * std::pow(10.0, spec.noise_db / 10.0));
        NormalStream noise(derive_stream_seed(spec.seed, kNoiseStream));
        for (auto& v : x)
            v += sigma * noise.next();
    }

    for (const auto& imp : spec.impulses) {
        if (imp.position >= spec.n)
            throw Error(ErrorKind::parameter, "impulse position beyond the signal end");
        if (imp.decay_per_sample < 0.0)
            throw Error(ErrorKind::parameter, "impulse decay must be non-negative");
        for (std::size_t t = imp.position; t < spec.n; ++t) {
            const double env = std::exp(-imp.decay_per_sample * static_cast<double>(t - imp.position));
            if (env < 1e-18)
                break;
            x[t] += imp.amplitude * env;
        }
    }
    return out;
}

} // namespace vibcs
