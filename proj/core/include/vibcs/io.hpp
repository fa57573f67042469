#pragma once

#include "vibcs/measure.hpp"
#include "vibcs/signal.hpp"
#include "vibcs/transforms.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace vibcs {

enum class SignalFormat { csv, wav, raw_f32, raw_f64 };

SignalFormat parse_signal_format(std::string_view name);

/// Reads one channel of a signal file.
///  - csv: one sample per line or comma-separated rows (column `channel`);
///    blank lines and lines starting with '#' are skipped. Sample rate is
///    the override, else 1 Hz.
///  - wav: PCM16, PCM24 or IEEE float32 (plain or extensible header);
///    integer PCM is scaled by 1/32768 or 1/8388608.
///  - raw_f32 / raw_f64: little-endian interleaved scalars; the sample rate
///    override is required.
Signal read_signal(const std::filesystem::path& path, SignalFormat format,
                   std::optional<double> sample_rate_override = std::nullopt,
                   std::size_t channel = 0);

/// One sample per line with 17 significant digits.
void write_signal_csv(const std::filesystem::path& path, const Signal& x);

/// Little-endian contiguous scalars, no header.
void write_signal_raw(const std::filesystem::path& path, const Signal& x, SignalFormat format);

struct Segmentation {
    std::size_t block_length = 0;
    std::vector<std::vector<double>> blocks;
    std::vector<std::size_t> true_lengths;
};

/// Non-overlapping length-n blocks; the tail block is zero-padded.
Segmentation segment(std::span<const double> x, std::size_t n);

/// Concatenates blocks with their padding removed.
std::vector<double> reassemble(const Segmentation& s);

struct ContainerSegment {
    std::uint32_t true_length = 0;
    std::vector<double> measurements;

    friend bool operator==(const ContainerSegment&, const ContainerSegment&) = default;
};

struct CompressedContainer {
    BasisSpec basis;
    MatrixSpec matrix;
    double sample_rate_hz = 1.0;
    std::vector<ContainerSegment> segments;

    friend bool operator==(const CompressedContainer&, const CompressedContainer&) = default;
};

inline constexpr std::uint16_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderBytes = 36;

/// `CSVB` layout, all little-endian:
///   magic "CSVB" | u16 version | u8 basis | u8 matrix | u32 n | u32 m |
///   u64 seed | f64 sample_rate_hz | u32 segment_count |
///   [wang: m x u32 indices] | segments: (u32 true_length, m x f64)*
std::vector<std::uint8_t> encode_container(const CompressedContainer& c);

/// Inverse of encode_container. Throws ErrorKind::format for bad magic,
/// version, codes, sizes or values and ErrorKind::integrity when Wang
/// indices disagree with the seed.
CompressedContainer decode_container(std::span<const std::uint8_t> bytes);

void write_container(const std::filesystem::path& path, const CompressedContainer& c);
CompressedContainer read_container(const std::filesystem::path& path);

} // namespace vibcs
