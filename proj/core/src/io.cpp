#include "vibcs/io.hpp"

#include "vibcs/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

namespace vibcs {

namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error(ErrorKind::io, "write to '" + path.string() + "' failed");
}

template <typename UInt>
UInt load_le(const std::uint8_t* p) {
    UInt v = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i)
        v |= static_cast<UInt>(p[i]) << (8 * i);
    return v;
}

template <typename UInt>
void store_le(std::vector<std::uint8_t>& out, UInt v) {
    for (std::size_t i = 0; i < sizeof(UInt); ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

double load_f64(const std::uint8_t* p) { return std::bit_cast<double>(load_le<std::uint64_t>(p)); }
float load_f32(const std::uint8_t* p) { return std::bit_cast<float>(load_le<std::uint32_t>(p)); }

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    const std::uint8_t* take(std::size_t count) {
        if (bytes_.size() - pos_ < count)
            throw Error(ErrorKind::format, "container truncated at byte " + std::to_string(pos_));
        const auto* p = bytes_.data() + pos_;
        pos_ += count;
        return p;
    }

    template <typename UInt>
    UInt u() { return load_le<UInt>(take(sizeof(UInt))); }
    double f64() { return load_f64(take(8)); }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

Signal read_csv(const std::filesystem::path& path, std::size_t channel) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for reading");
    Signal x;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (view.empty() || view.front() == '#')
            continue;
        std::size_t column = 0;
        std::string_view field;
        bool found = false;
        while (true) {
            const auto comma = view.find(',');
            const auto cell = view.substr(0, comma);
            if (column == channel) {
                field = trim(cell);
                found = true;
                break;
            }
            if (comma == std::string_view::npos)
                break;
            view.remove_prefix(comma + 1);
            ++column;
        }
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (!found)
            throw Error(ErrorKind::parse, where + ": no column " + std::to_string(channel));
        if (!field.empty() && field.front() == '+')
            field.remove_prefix(1);
        double v = 0.0;
        const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc{} || end != field.data() + field.size() || field.empty())
            throw Error(ErrorKind::parse, where + ": not a number: '" + std::string(field) + "'");
        if (!std::isfinite(v))
            throw Error(ErrorKind::parse, where + ": non-finite sample");
        x.samples.push_back(v);
    }
    return x;
}

struct WavFormat {
    std::uint16_t encoding = 0; // 1 = PCM, 3 = IEEE float
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits = 0;
};

Signal read_wav(const std::filesystem::path& path, std::size_t channel) {
    const auto bytes = read_bytes(path);
    const auto fail = [&](const std::string& why) {
        return Error(ErrorKind::format, path.string() + ": " + why);
    };
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw fail("not a RIFF/WAVE file");

    WavFormat fmt;
    bool have_fmt = false;
    std::span<const std::uint8_t> data;
    bool have_data = false;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const auto* chunk = bytes.data() + pos;
        const std::uint32_t size = load_le<std::uint32_t>(chunk + 4);
        const std::size_t body = pos + 8;
        const std::size_t available = std::min<std::size_t>(size, bytes.size() - body);
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (available < 16)
                throw fail("short fmt chunk");
            fmt.encoding = load_le<std::uint16_t>(chunk + 8);
            fmt.channels = load_le<std::uint16_t>(chunk + 10);
            fmt.sample_rate = load_le<std::uint32_t>(chunk + 12);
            fmt.bits = load_le<std::uint16_t>(chunk + 22);
            if (fmt.encoding == 0xFFFE) {
                if (available < 40)
                    throw fail("short extensible fmt chunk");
                // First two bytes of the sub-format GUID carry the encoding.
                fmt.encoding = load_le<std::uint16_t>(chunk + 8 + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            data = std::span<const std::uint8_t>(bytes).subspan(body, available);
            have_data = true;
        }
        pos = body + size + (size & 1u);
    }
    if (!have_fmt || !have_data)
        throw fail("missing fmt or data chunk");

    const bool pcm16 = fmt.encoding == 1 && fmt.bits == 16;
    const bool pcm24 = fmt.encoding == 1 && fmt.bits == 24;
    const bool float32 = fmt.encoding == 3 && fmt.bits == 32;
    if (!pcm16 && !pcm24 && !float32)
        throw fail("unsupported encoding (format " + std::to_string(fmt.encoding) + ", " +
                   std::to_string(fmt.bits) + " bits)");
    if (fmt.channels == 0 || fmt.sample_rate == 0)
        throw fail("invalid channel count or sample rate");
    if (channel >= fmt.channels)
        throw Error(ErrorKind::parameter, "channel " + std::to_string(channel) +
                                              " requested from a " +
                                              std::to_string(fmt.channels) + "-channel file");

    const std::size_t width = fmt.bits / 8;
    const std::size_t frame = width * fmt.channels;
    const std::size_t frames = data.size() / frame;
    Signal x;
    x.sample_rate_hz = fmt.sample_rate;
    x.samples.resize(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        const auto* p = data.data() + f * frame + channel * width;
        if (pcm16) {
            x.samples[f] = static_cast<std::int16_t>(load_le<std::uint16_t>(p)) / 32768.0;
        } else if (pcm24) {
            std::uint32_t raw = load_le<std::uint16_t>(p) | (std::uint32_t{p[2]} << 16);
            if (raw & 0x800000u)
                raw |= 0xFF000000u;
            x.samples[f] = static_cast<std::int32_t>(raw) / 8388608.0;
        } else {
            const float v = load_f32(p);
            if (!std::isfinite(v))
                throw fail("non-finite sample at frame " + std::to_string(f));
            x.samples[f] = v;
        }
    }
    return x;
}

Signal read_raw(const std::filesystem::path& path, SignalFormat format) {
    const auto bytes = read_bytes(path);
    const std::size_t width = format == SignalFormat::raw_f32 ? 4 : 8;
    if (bytes.size() % width != 0)
        throw Error(ErrorKind::format, path.string() + ": size is not a multiple of " +
                                           std::to_string(width) + " bytes");
    Signal x;
    x.samples.resize(bytes.size() / width);
    for (std::size_t i = 0; i < x.samples.size(); ++i) {
        const auto* p = bytes.data() + i * width;
        const double v = width == 4 ? load_f32(p) : load_f64(p);
        if (!std::isfinite(v))
            throw Error(ErrorKind::format,
                        path.string() + ": non-finite sample at index " + std::to_string(i));
        x.samples[i] = v;
    }
    return x;
}

} // namespace

SignalFormat parse_signal_format(std::string_view name) {
    if (name == "csv") return SignalFormat::csv;
    if (name == "wav") return SignalFormat::wav;
    if (name == "raw_f32" || name == "f32") return SignalFormat::raw_f32;
    if (name == "raw_f64" || name == "f64") return SignalFormat::raw_f64;
    throw Error(ErrorKind::parameter, "unknown signal format '" + std::string(name) + "'");
}

Signal read_signal(const std::filesystem::path& path, SignalFormat format,
                   std::optional<double> sample_rate_override, std::size_t channel) {
    if (sample_rate_override && !(*sample_rate_override > 0.0 && std::isfinite(*sample_rate_override)))
        throw Error(ErrorKind::parameter, "sample rate must be positive");
    Signal x;
    switch (format) {
    case SignalFormat::csv:
        x = read_csv(path, channel);
        break;
    case SignalFormat::wav:
        x = read_wav(path, channel);
        break;
    case SignalFormat::raw_f32:
    case SignalFormat::raw_f64:
        if (!sample_rate_override)
            throw Error(ErrorKind::parameter, "raw input needs an explicit sample rate");
        if (channel != 0)
            throw Error(ErrorKind::parameter, "raw input is single-channel");
        x = read_raw(path, format);
        break;
    }
    if (sample_rate_override)
        x.sample_rate_hz = *sample_rate_override;
    x.source = path.string();
    if (x.samples.empty())
        std::cerr << "vibcs: warning: '" << path.string() << "' contains no samples\n";
    return x;
}

void write_signal_csv(const std::filesystem::path& path, const Signal& x) {
    std::string text;
    text.reserve(x.samples.size() * 24);
    std::array<char, 64> buf{};
    for (double v : x.samples) {
        const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                             std::chars_format::general, 17);
        text.append(buf.data(), end);
        text.push_back('\n');
    }
    write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void write_signal_raw(const std::filesystem::path& path, const Signal& x, SignalFormat format) {
    std::vector<std::uint8_t> out;
    if (format == SignalFormat::raw_f64) {
        out.reserve(x.samples.size() * 8);
        for (double v : x.samples)
            store_le(out, std::bit_cast<std::uint64_t>(v));
    } else if (format == SignalFormat::raw_f32) {
        out.reserve(x.samples.size() * 4);
        for (double v : x.samples)
            store_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    } else {
        throw Error(ErrorKind::parameter, "write_signal_raw needs a raw format");
    }
    write_bytes(path, out);
}

Segmentation segment(std::span<const double> x, std::size_t n) {
    if (n < 2)
        throw Error(ErrorKind::parameter, "block length must be >= 2");
    Segmentation s;
    s.block_length = n;
    for (std::size_t start = 0; start < x.size(); start += n) {
        const std::size_t len = std::min(n, x.size() - start);
        std::vector<double> block(n, 0.0);
        std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(start), len, block.begin());
        s.blocks.push_back(std::move(block));
        s.true_lengths.push_back(len);
    }
    return s;
}

std::vector<double> reassemble(const Segmentation& s) {
    std::vector<double> out;
    for (std::size_t i = 0; i < s.blocks.size(); ++i)
        out.insert(out.end(), s.blocks[i].begin(),
                   s.blocks[i].begin() + static_cast<std::ptrdiff_t>(s.true_lengths[i]));
    return out;
}

std::vector<std::uint8_t> encode_container(const CompressedContainer& c) {
    const auto& spec = c.matrix;
    if (spec.n() != c.basis.n())
        throw Error(ErrorKind::parameter, "container basis and matrix lengths differ");
    if (spec.n() > UINT32_MAX || c.segments.size() > UINT32_MAX)
        throw Error(ErrorKind::parameter, "container dimensions exceed 32 bits");
    std::vector<std::uint8_t> out;
    out.reserve(kContainerHeaderBytes + 4 * spec.wang_indices().size() +
                c.segments.size() * (4 + 8 * spec.m()));
    for (char ch : std::string_view("CSVB"))
        out.push_back(static_cast<std::uint8_t>(ch));
    store_le<std::uint16_t>(out, kContainerVersion);
    out.push_back(static_cast<std::uint8_t>(c.basis.kind()));
    out.push_back(static_cast<std::uint8_t>(spec.kind()));
    store_le<std::uint32_t>(out, static_cast<std::uint32_t>(spec.n()));
    store_le<std::uint32_t>(out, static_cast<std::uint32_t>(spec.m()));
    store_le<std::uint64_t>(out, spec.seed());
    store_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(c.sample_rate_hz));
    store_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.segments.size()));
    for (auto idx : spec.wang_indices())
        store_le<std::uint32_t>(out, idx);
    for (const auto& seg : c.segments) {
        if (seg.measurements.size() != spec.m())
            throw Error(ErrorKind::parameter, "segment measurement count differs from m");
        if (seg.true_length == 0 || seg.true_length > spec.n())
            throw Error(ErrorKind::parameter, "segment true length must lie in [1, n]");
        store_le<std::uint32_t>(out, seg.true_length);
        for (double v : seg.measurements)
            store_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    }
    return out;
}

CompressedContainer decode_container(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    if (std::memcmp(in.take(4), "CSVB", 4) != 0)
        throw Error(ErrorKind::format, "bad container magic");
    const auto version = in.u<std::uint16_t>();
    if (version != kContainerVersion)
        throw Error(ErrorKind::format, "unsupported container version " + std::to_string(version));
    const auto basis_code = in.u<std::uint8_t>();
    const auto matrix_code = in.u<std::uint8_t>();
    if (basis_code > 3)
        throw Error(ErrorKind::format, "bad basis code " + std::to_string(basis_code));
    if (matrix_code > 2)
        throw Error(ErrorKind::format, "bad matrix code " + std::to_string(matrix_code));
    const std::size_t n = in.u<std::uint32_t>();
    const std::size_t m = in.u<std::uint32_t>();
    const auto seed = in.u<std::uint64_t>();
    const double rate = in.f64();
    const std::size_t count = in.u<std::uint32_t>();
    if (n < 2 || m == 0 || m > n)
        throw Error(ErrorKind::format, "inconsistent dimensions m=" + std::to_string(m) +
                                           ", n=" + std::to_string(n));
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw Error(ErrorKind::format, "invalid sample rate");

    const auto kind = static_cast<MatrixKind>(matrix_code);
    const std::size_t fixed = kContainerHeaderBytes + (kind == MatrixKind::wang ? 4 * m : 0);
    const std::size_t per_segment = 4 + 8 * m;
    if (bytes.size() < fixed || (bytes.size() - fixed) % per_segment != 0 ||
        (bytes.size() - fixed) / per_segment != count)
        throw Error(ErrorKind::format, "container size " + std::to_string(bytes.size()) +
                                           " does not match its header");

    std::optional<BasisSpec> basis;
    try {
        basis.emplace(static_cast<BasisKind>(basis_code), n);
    } catch (const Error& e) {
        throw Error(ErrorKind::format, std::string("invalid basis in header: ") + e.what());
    }

    std::vector<std::uint32_t> indices;
    if (kind == MatrixKind::wang) {
        indices.resize(m);
        for (auto& idx : indices)
            idx = in.u<std::uint32_t>();
    }
    std::optional<MatrixSpec> spec;
    try {
        spec.emplace(kind, m, n, seed, std::move(indices));
    } catch (const Error& e) {
        throw Error(ErrorKind::integrity, std::string("corrupted row indices: ") + e.what());
    }
    if (!spec->matches_seed())
        throw Error(ErrorKind::integrity,
                    "wang row indices do not match regeneration from the stored seed");

    CompressedContainer c{*basis, *spec, rate, {}};
    c.segments.resize(count);
    for (std::size_t s = 0; s < count; ++s) {
        auto& seg = c.segments[s];
        seg.true_length = in.u<std::uint32_t>();
        if (seg.true_length == 0 || seg.true_length > n || (s + 1 < count && seg.true_length != n))
            throw Error(ErrorKind::format, "segment " + std::to_string(s) + " has invalid length " +
                                               std::to_string(seg.true_length));
        seg.measurements.resize(m);
        for (auto& v : seg.measurements) {
            v = in.f64();
            if (!std::isfinite(v))
                throw Error(ErrorKind::format,
                            "non-finite measurement in segment " + std::to_string(s));
        }
    }
    return c;
}

void write_container(const std::filesystem::path& path, const CompressedContainer& c) {
    write_bytes(path, encode_container(c));
}

CompressedContainer read_container(const std::filesystem::path& path) {
    return decode_container(read_bytes(path));
}

} // namespace vibcs
