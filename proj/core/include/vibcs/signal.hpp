#pragma once

#include <string>
#include <vector>

namespace vibcs {

/// Real-valued sample sequence with its acquisition rate.
struct Signal {
    std::vector<double> samples;
    double sample_rate_hz = 1.0;
    std::string source;
};

} // namespace vibcs
