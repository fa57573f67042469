#pragma once

#include "vibcs/error.hpp"
#include "vibcs/synth.hpp"

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace vibcs::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitUsage = 2,
    kExitParse = 3,
    kExitParameter = 4,
    kExitFormat = 5,
    kExitIntegrity = 6,
    kExitIo = 7,
};

int exit_code_for(ErrorKind kind) noexcept;

/// Runs one command line; args[0] is the program name. Errors are reported
/// on `err` and turned into exit codes, never thrown.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// m = round(cr * n / 100). Throws ErrorKind::parameter when cr is outside
/// (0, 100] or rounds to zero measurements.
std::size_t measurement_count(double cr_percent, std::size_t n);

/// Shortest round-trip decimal; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v);

/// "f:a:phase" items (amplitude and phase optional, default 1 and 0).
std::vector<Tone> parse_tones(const std::vector<std::string>& items);
/// "position:amplitude:decay" items (decay optional, default 0.5).
std::vector<Impulse> parse_impulses(const std::vector<std::string>& items);
/// Integers or inclusive ranges "a-b".
std::vector<std::uint64_t> parse_seeds(const std::vector<std::string>& items);

} // namespace vibcs::cli
