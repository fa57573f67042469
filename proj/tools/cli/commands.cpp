#include "commands.hpp"

#include "vibcs/io.hpp"
#include "vibcs/measure.hpp"
#include "vibcs/metrics.hpp"
#include "vibcs/recover.hpp"
#include "vibcs/transforms.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <thread>

namespace vibcs::cli {

namespace {

constexpr double kNoNoise = -std::numeric_limits<double>::infinity();

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos)
            return parts;
        start = pos + 1;
    }
}

double to_double(std::string_view text, std::string_view what) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [p, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || p != end)
        throw Error(ErrorKind::parameter,
                    "invalid " + std::string(what) + " '" + std::string(text) + "'");
    return v;
}

std::uint64_t to_u64(std::string_view text, std::string_view what) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [p, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || p != end)
        throw Error(ErrorKind::parameter,
                    "invalid " + std::string(what) + " '" + std::string(text) + "'");
    return v;
}

// Input is a file when --input is given, otherwise a synthetic signal built
// from the synth flags.
struct SourceOptions {
    std::string input;
    std::string format;
    double rate = 0.0;
    CLI::Option* rate_opt = nullptr;
    std::size_t channel = 0;
    std::vector<std::string> tones;
    std::vector<std::string> impulses;
    double noise_db = kNoNoise;
    std::uint64_t synth_seed = 0;
    std::size_t length = 0;
};

void add_file_options(CLI::App& cmd, SourceOptions& s, const std::string& name,
                      const std::string& help) {
    cmd.add_option(name, s.input, help);
    cmd.add_option("--format", s.format, "csv, wav, raw_f32 or raw_f64 (default: by extension)");
    s.rate_opt = cmd.add_option("--rate", s.rate, "sample rate in Hz");
    cmd.add_option("--channel", s.channel, "channel index for multichannel input");
}

void add_synth_options(CLI::App& cmd, SourceOptions& s) {
    cmd.add_option("--tones", s.tones, "f:a:phase list for a synthetic input")->delimiter(',');
    cmd.add_option("--impulses", s.impulses, "position:amplitude:decay list")->delimiter(',');
    cmd.add_option("--noise-db", s.noise_db, "noise power relative to the strongest tone");
    cmd.add_option("--synth-seed", s.synth_seed, "noise seed of the synthetic input");
    cmd.add_option("--length", s.length, "synthetic length in samples (default: one block)");
}

SignalFormat infer_format(const std::string& path, const std::string& format) {
    if (!format.empty())
        return parse_signal_format(format);
    std::string ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".wav")
        return SignalFormat::wav;
    if (ext == ".f32")
        return SignalFormat::raw_f32;
    if (ext == ".f64" || ext == ".raw" || ext == ".bin")
        return SignalFormat::raw_f64;
    return SignalFormat::csv;
}

Signal read_file(const SourceOptions& s, const std::string& path) {
    std::optional<double> rate;
    if (s.rate_opt && s.rate_opt->count() > 0)
        rate = s.rate;
    return read_signal(path, infer_format(path, s.format), rate, s.channel);
}

Signal load_source(const SourceOptions& s, std::size_t block_length) {
    if (!s.input.empty())
        return read_file(s, s.input);
    SynthSpec spec;
    spec.n = s.length > 0 ? s.length : block_length;
    spec.sample_rate_hz = s.rate_opt && s.rate_opt->count() > 0 ? s.rate : 20000.0;
    spec.tones = parse_tones(s.tones);
    spec.impulses = parse_impulses(s.impulses);
    spec.noise_db = s.noise_db;
    spec.seed = s.synth_seed;
    if (spec.tones.empty() && spec.impulses.empty() && spec.noise_db == kNoNoise)
        throw Error(ErrorKind::parameter, "no --input and no synthetic content given");
    return generate(spec);
}

struct OmpOptions {
    std::optional<std::size_t> max_atoms;
    double tol = OmpConfig{}.residual_tol_rel;
};

void add_omp_options(CLI::App& cmd, OmpOptions& o) {
    cmd.add_option("--omp-max-atoms", o.max_atoms, "atom budget (default floor(m/2))");
    cmd.add_option("--omp-tol", o.tol, "relative residual tolerance");
}

OmpConfig omp_config(const OmpOptions& o) {
    if (!(o.tol >= 0.0))
        throw Error(ErrorKind::parameter, "--omp-tol must be non-negative");
    OmpConfig cfg;
    cfg.max_atoms = o.max_atoms;
    cfg.residual_tol_rel = o.tol;
    return cfg;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << text;
    if (!f)
        throw Error(ErrorKind::io, "cannot write '" + path + "'");
}

template <typename Fn>
double metric_or_nan(Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::undefined_metric)
            throw;
        return std::numeric_limits<double>::quiet_NaN();
    }
}

template <typename Kind>
std::vector<Kind> parse_kinds(const std::vector<std::string>& names, Kind (*parse)(std::string_view)) {
    std::vector<Kind> kinds;
    for (const auto& name : names)
        kinds.push_back(parse(name));
    std::sort(kinds.begin(), kinds.end());
    kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
    if (kinds.empty())
        throw Error(ErrorKind::parameter, "empty list");
    return kinds;
}

template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Runs fn(i) for i in [0, count) on up to `threads` threads; the first
// failure (by index) is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const std::size_t workers = std::min<std::size_t>(threads, count);
        for (std::size_t t = 1; t < workers; ++t)
            pool.emplace_back(worker);
        worker();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

unsigned default_threads() {
    return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------- compress

struct CompressOptions {
    SourceOptions source;
    std::string basis = "dft";
    std::string matrix = "wang";
    double cr = 10.0;
    std::uint64_t seed = 0;
    std::size_t n = 1024;
    std::string out;
};

void cmd_compress(const CompressOptions& o, std::ostream& out) {
    const Signal x = read_file(o.source, o.source.input);
    const BasisSpec basis(parse_basis_kind(o.basis), o.n);
    const std::size_t m = measurement_count(o.cr, o.n);
    CompressedContainer c{basis, build_matrix(parse_matrix_kind(o.matrix), m, o.n, o.seed),
                          x.sample_rate_hz, {}};
    const auto seg = segment(x.samples, o.n);
    for (std::size_t i = 0; i < seg.blocks.size(); ++i)
        c.segments.push_back({static_cast<std::uint32_t>(seg.true_lengths[i]),
                              apply_matrix(c.matrix, seg.blocks[i]).values});
    write_container(o.out, c);
    out << "m=" << m << " n=" << o.n << " cr=" << format_number(compression_ratio(m, o.n))
        << " segments=" << c.segments.size() << '\n';
}

// ------------------------------------------------------------- reconstruct

struct ReconstructOptions {
    std::string input;
    OmpOptions omp;
    std::string out;
};

void cmd_reconstruct(const ReconstructOptions& o, std::ostream& out) {
    const auto c = read_container(o.input);
    const OmpConfig cfg = omp_config(o.omp);
    Signal x{{}, c.sample_rate_hz, o.input};
    if (!c.segments.empty()) {
        const SensingDictionary dict(c.matrix, c.basis);
        for (std::size_t i = 0; i < c.segments.size(); ++i) {
            const auto& seg = c.segments[i];
            const auto r = reconstruct_block(seg.measurements, dict, cfg);
            x.samples.insert(x.samples.end(), r.x_hat.begin(), r.x_hat.begin() + seg.true_length);
            out << "segment " << i << " iterations=" << r.iterations
                << " residual=" << format_number(r.residual_norm) << '\n';
        }
    }
    write_signal_csv(o.out, x);
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
    SourceOptions source;
    std::string reconstructed;
    std::string out;
};

void cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
    const Signal x = read_file(o.source, o.source.input);
    const Signal y = read_file(o.source, o.reconstructed);
    if (x.samples.size() != y.samples.size())
        throw Error(ErrorKind::dimension, "signals differ in length (" +
                                              std::to_string(x.samples.size()) + " vs " +
                                              std::to_string(y.samples.size()) + ")");
    std::string text = "snr_db,rms_orig,rms_rec,kurt_orig,kurt_rec\n";
    text += format_number(metric_or_nan([&] { return snr_db(x.samples, y.samples); })) + ',';
    text += format_number(metric_or_nan([&] { return rms(x.samples); })) + ',';
    text += format_number(metric_or_nan([&] { return rms(y.samples); })) + ',';
    text += format_number(metric_or_nan([&] { return kurtosis(x.samples); })) + ',';
    text += format_number(metric_or_nan([&] { return kurtosis(y.samples); })) + '\n';
    emit(o.out, text, out);
}

// ------------------------------------------------------------------- sweep

struct SweepOptions {
    SourceOptions source;
    std::vector<std::string> bases{"dft"};
    std::vector<std::string> matrices{"gaussian", "bernoulli", "wang"};
    std::vector<double> crs{3, 5, 10, 20, 30};
    std::vector<std::string> seeds{"0-9"};
    std::size_t n = 1024;
    OmpOptions omp;
    unsigned threads = 0;
    bool timing = false;
    std::string out;
};

struct SweepRow {
    double snr = 0.0;
    double iterations_mean = 0.0;
    double wall_ms = 0.0;
};

void cmd_sweep(const SweepOptions& o, std::ostream& out) {
    const auto bases = parse_kinds(o.bases, &parse_basis_kind);
    const auto matrices = parse_kinds(o.matrices, &parse_matrix_kind);
    const auto crs = sorted_unique(o.crs);
    const auto seeds = sorted_unique(parse_seeds(o.seeds));
    if (crs.empty() || seeds.empty())
        throw Error(ErrorKind::parameter, "sweep needs at least one CR and one seed");
    for (auto b : bases)
        (void)BasisSpec(b, o.n);
    for (double cr : crs)
        (void)measurement_count(cr, o.n);
    const OmpConfig cfg = omp_config(o.omp);

    const Signal x = load_source(o.source, o.n);
    const auto seg = segment(x.samples, o.n);

    struct Cell {
        BasisKind basis;
        MatrixKind matrix;
        double cr;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (auto b : bases)
        for (auto mk : matrices)
            for (double cr : crs)
                for (auto s : seeds)
                    cells.push_back({b, mk, cr, s});

    std::vector<SweepRow> rows(cells.size());
    parallel_for(cells.size(), o.threads > 0 ? o.threads : default_threads(), [&](std::size_t i) {
        const auto start = std::chrono::steady_clock::now();
        const Cell& c = cells[i];
        const auto spec = build_matrix(c.matrix, measurement_count(c.cr, o.n), o.n, c.seed);
        const SensingDictionary dict(spec, BasisSpec(c.basis, o.n));
        Segmentation rec = seg;
        double iterations = 0.0;
        for (auto& block : rec.blocks) {
            auto r = reconstruct_block(apply_matrix(spec, block).values, dict, cfg);
            iterations += static_cast<double>(r.iterations);
            block = std::move(r.x_hat);
        }
        SweepRow& row = rows[i];
        row.snr = metric_or_nan([&] { return snr_db(x.samples, reassemble(rec)); });
        row.iterations_mean = rec.blocks.empty() ? 0.0 : iterations / static_cast<double>(rec.blocks.size());
        if (o.timing)
            row.wall_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
    });

    std::string text = "basis,matrix,cr_percent,m,seed,snr_db,iterations_mean,wall_ms\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& c = cells[i];
        text += std::string(to_string(c.basis)) + ',' + std::string(to_string(c.matrix)) + ',' +
                format_number(c.cr) + ',' + std::to_string(measurement_count(c.cr, o.n)) + ',' +
                std::to_string(c.seed) + ',' + format_number(rows[i].snr) + ',' +
                format_number(rows[i].iterations_mean) + ',' + format_number(rows[i].wall_ms) +
                '\n';
    }
    emit(o.out, text, out);
}

// --------------------------------------------------------------- coherence

struct CoherenceOptions {
    std::vector<std::string> bases{"dct", "dft"};
    std::vector<std::string> matrices{"gaussian", "bernoulli", "wang"};
    std::size_t n = 1024;
    std::size_t m = 0;
    double cr = 10.0;
    std::vector<std::string> seeds{"0-9"};
    std::string out;
};

// Wang rows pick single samples, so the coherence is sqrt(n) times the
// largest basis entry: 1 for the DFT, sqrt(2) cos(pi / 2n) for the DCT-II.
std::optional<double> wang_expected(BasisKind basis, std::size_t n) {
    if (basis == BasisKind::dft)
        return 1.0;
    if (basis == BasisKind::dct)
        return std::numbers::sqrt2 * std::cos(std::numbers::pi / (2.0 * static_cast<double>(n)));
    return std::nullopt;
}

void cmd_coherence(const CoherenceOptions& o, std::ostream& out) {
    const auto bases = parse_kinds(o.bases, &parse_basis_kind);
    const auto matrices = parse_kinds(o.matrices, &parse_matrix_kind);
    const auto seeds = sorted_unique(parse_seeds(o.seeds));
    const std::size_t m = o.m > 0 ? o.m : measurement_count(o.cr, o.n);
    std::string text = "basis,matrix,n,m,seed,coherence,expected\n";
    for (auto b : bases) {
        const BasisSpec basis(b, o.n);
        for (auto mk : matrices)
            for (auto seed : seeds) {
                const double mu = coherence(build_matrix(mk, m, o.n, seed), basis);
                const auto expected = mk == MatrixKind::wang ? wang_expected(b, o.n) : std::nullopt;
                text += std::string(to_string(b)) + ',' + std::string(to_string(mk)) + ',' +
                        std::to_string(o.n) + ',' + std::to_string(m) + ',' +
                        std::to_string(seed) + ',' + format_number(mu) + ',' +
                        (expected ? format_number(*expected) : std::string()) + '\n';
            }
    }
    emit(o.out, text, out);
}

// ---------------------------------------------------------------- sparsity

struct SparsityOptions {
    SourceOptions source;
    std::vector<std::string> bases{"dct", "dft", "db2", "db8"};
    std::size_t n = 1024;
    double threshold = 0.01;
    std::string out;
};

void cmd_sparsity(const SparsityOptions& o, std::ostream& out) {
    const auto bases = parse_kinds(o.bases, &parse_basis_kind);
    if (!(o.threshold > 0.0 && o.threshold < 1.0))
        throw Error(ErrorKind::parameter, "--threshold must lie in (0, 1)");
    for (auto b : bases)
        (void)BasisSpec(b, o.n);
    const Signal x = load_source(o.source, o.n);
    const auto seg = segment(x.samples, o.n);
    std::string text = "basis,n,segments,sparsity_mean\n";
    for (auto b : bases) {
        const BasisSpec basis(b, o.n);
        double sum = 0.0;
        for (const auto& block : seg.blocks)
            sum += sparsity_fraction(analyze(block, basis), o.threshold);
        const double mean = seg.blocks.empty() ? 0.0 : sum / static_cast<double>(seg.blocks.size());
        text += std::string(to_string(b)) + ',' + std::to_string(o.n) + ',' +
                std::to_string(seg.blocks.size()) + ',' + format_number(mean) + '\n';
    }
    emit(o.out, text, out);
}

// ------------------------------------------------------------------- synth

struct SynthOptions {
    std::vector<std::string> tones;
    std::vector<std::string> impulses;
    double noise_db = kNoNoise;
    std::uint64_t seed = 0;
    std::size_t n = 1024;
    double rate = 20000.0;
    std::string format = "csv";
    std::string out;
};

void cmd_synth(const SynthOptions& o, std::ostream& out) {
    SynthSpec spec;
    spec.n = o.n;
    spec.sample_rate_hz = o.rate;
    spec.tones = parse_tones(o.tones);
    spec.impulses = parse_impulses(o.impulses);
    spec.noise_db = o.noise_db;
    spec.seed = o.seed;
    const Signal x = generate(spec);
    const auto format = parse_signal_format(o.format);
    if (format == SignalFormat::csv)
        write_signal_csv(o.out, x);
    else if (format == SignalFormat::wav)
        throw Error(ErrorKind::parameter, "synth writes csv, raw_f32 or raw_f64");
    else
        write_signal_raw(o.out, x, format);
    out << "samples=" << x.samples.size() << " rate=" << format_number(x.sample_rate_hz) << '\n';
}


// Replaces `--config <file>` by the file's key=value pairs, skipping keys the
// command line already sets. Blank lines and lines starting with '#' are
// ignored.
std::vector<std::string> apply_config(const std::vector<std::string>& args, const CLI::App& app) {
    std::vector<std::string> out;
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[++i];
            continue;
        }
        if (args[i].starts_with("--config=")) {
            path = args[i].substr(9);
            continue;
        }
        out.push_back(args[i]);
    }
    if (path.empty())
        return out;

    const CLI::App* sub = nullptr;
    for (std::size_t i = 1; i < out.size() && !sub; ++i)
        for (const auto* candidate : app.get_subcommands({}))
            if (candidate->get_name() == out[i])
                sub = candidate;
    if (!sub)
        throw Error(ErrorKind::parameter, "--config needs a command");

    std::ifstream f(path);
    if (!f)
        throw Error(ErrorKind::io, "cannot open config '" + path + "'");
    std::string line;
    for (std::size_t line_no = 1; std::getline(f, line); ++line_no) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::parse, path + ":" + std::to_string(line_no) + ": expected key=value");
        const auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt || key == "config")
            throw Error(ErrorKind::parse, path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        bool given = false;
        for (const auto& name : opt->get_lnames())
            for (const auto& a : out)
                if (a == "--" + name || a.starts_with("--" + name + "="))
                    given = true;
        if (!given)
            out.push_back("--" + key + "=" + value);
    }
    return out;
}

} // namespace

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::parse: return kExitParse;
    case ErrorKind::format: return kExitFormat;
    case ErrorKind::integrity: return kExitIntegrity;
    case ErrorKind::io: return kExitIo;
    case ErrorKind::resource: return kExitFailure;
    case ErrorKind::dimension:
    case ErrorKind::parameter:
    case ErrorKind::index:
    case ErrorKind::symmetry:
    case ErrorKind::rank_deficient:
    case ErrorKind::undefined_metric: return kExitParameter;
    }
    return kExitFailure;
}

std::size_t measurement_count(double cr_percent, std::size_t n) {
    if (!(cr_percent > 0.0 && cr_percent <= 100.0))
        throw Error(ErrorKind::parameter, "CR must lie in (0, 100], got " + format_number(cr_percent));
    const double m = std::round(cr_percent * static_cast<double>(n) / 100.0);
    if (m < 1.0)
        throw Error(ErrorKind::parameter, "CR " + format_number(cr_percent) + "% of n=" +
                                              std::to_string(n) + " leaves no measurements");
    return static_cast<std::size_t>(m);
}

std::string format_number(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::vector<Tone> parse_tones(const std::vector<std::string>& items) {
    std::vector<Tone> tones;
    for (const auto& item : items) {
        const auto parts = split(item, ':');
        if (parts.size() > 3)
            throw Error(ErrorKind::parameter, "tone '" + item + "' is not f:a:phase");
        Tone t;
        t.frequency_hz = to_double(parts[0], "tone frequency");
        if (parts.size() > 1)
            t.amplitude = to_double(parts[1], "tone amplitude");
        if (parts.size() > 2)
            t.phase_rad = to_double(parts[2], "tone phase");
        tones.push_back(t);
    }
    return tones;
}

std::vector<Impulse> parse_impulses(const std::vector<std::string>& items) {
    std::vector<Impulse> impulses;
    for (const auto& item : items) {
        const auto parts = split(item, ':');
        if (parts.size() < 2 || parts.size() > 3)
            throw Error(ErrorKind::parameter, "impulse '" + item + "' is not position:amplitude:decay");
        Impulse imp;
        imp.position = static_cast<std::size_t>(to_u64(parts[0], "impulse position"));
        imp.amplitude = to_double(parts[1], "impulse amplitude");
        if (parts.size() > 2)
            imp.decay_per_sample = to_double(parts[2], "impulse decay");
        impulses.push_back(imp);
    }
    return impulses;
}

std::vector<std::uint64_t> parse_seeds(const std::vector<std::string>& items) {
    std::vector<std::uint64_t> seeds;
    for (const auto& item : items) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            seeds.push_back(to_u64(item, "seed"));
            continue;
        }
        const auto lo = to_u64(std::string_view(item).substr(0, dash), "seed");
        const auto hi = to_u64(std::string_view(item).substr(dash + 1), "seed");
        if (hi < lo || hi - lo >= 1'000'000)
            throw Error(ErrorKind::parameter, "bad seed range '" + item + "'");
        for (auto s = lo; s <= hi; ++s)
            seeds.push_back(s);
    }
    return seeds;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compressive sensing toolkit for vibration signals", "vibcs"};
    app.require_subcommand(1);
    std::string config_path;

    CompressOptions compress;
    auto* c = app.add_subcommand("compress", "segment a signal and write a CSVB container");
    c->add_option("--config", config_path, "flat key=value file; flags override it");
    add_file_options(*c, compress.source, "--input", "signal file");
    c->get_option("--input")->required();
    c->add_option("--basis", compress.basis, "dct, dft, db2 or db8");
    c->add_option("--matrix", compress.matrix, "gaussian, bernoulli or wang");
    c->add_option("--cr", compress.cr, "measurements kept, percent of n");
    c->add_option("--seed", compress.seed, "matrix seed");
    c->add_option("--n", compress.n, "block length");
    c->add_option("--out", compress.out, "container path")->required();

    ReconstructOptions reconstruct;
    auto* r = app.add_subcommand("reconstruct", "recover a signal from a container");
    r->add_option("--config", config_path, "flat key=value file; flags override it");
    r->add_option("--input", reconstruct.input, "container path")->required();
    add_omp_options(*r, reconstruct.omp);
    r->add_option("--out", reconstruct.out, "output CSV")->required();

    EvaluateOptions evaluate;
    auto* e = app.add_subcommand("evaluate", "compare an original and a reconstructed signal");
    e->add_option("--config", config_path, "flat key=value file; flags override it");
    add_file_options(*e, evaluate.source, "--original", "original signal");
    e->get_option("--original")->required();
    e->add_option("--reconstructed", evaluate.reconstructed, "reconstructed signal")->required();
    e->add_option("--out", evaluate.out, "report CSV (default stdout)");

    SweepOptions sweep;
    auto* s = app.add_subcommand("sweep", "SNR over bases, matrices, CRs and seeds");
    s->add_option("--config", config_path, "flat key=value file; flags override it");
    add_file_options(*s, sweep.source, "--input", "signal file (default: synthetic)");
    add_synth_options(*s, sweep.source);
    s->add_option("--basis", sweep.bases, "basis list")->delimiter(',');
    s->add_option("--matrix", sweep.matrices, "matrix list")->delimiter(',');
    s->add_option("--cr", sweep.crs, "CR list (percent)")->delimiter(',');
    s->add_option("--seeds,--seed", sweep.seeds, "seeds or ranges a-b")->delimiter(',');
    s->add_option("--n", sweep.n, "block length");
    add_omp_options(*s, sweep.omp);
    s->add_option("--threads", sweep.threads, "worker threads (default: all cores)");
    s->add_flag("--timing", sweep.timing, "fill wall_ms (makes reports run-dependent)");
    s->add_option("--out", sweep.out, "report CSV (default stdout)");

    CoherenceOptions coh;
    auto* h = app.add_subcommand("coherence", "mutual coherence per basis and matrix");
    h->add_option("--config", config_path, "flat key=value file; flags override it");
    h->add_option("--basis", coh.bases, "basis list")->delimiter(',');
    h->add_option("--matrix", coh.matrices, "matrix list")->delimiter(',');
    h->add_option("--n", coh.n, "block length");
    h->add_option("--m", coh.m, "measurement count (overrides --cr)");
    h->add_option("--cr", coh.cr, "measurements kept, percent of n");
    h->add_option("--seeds,--seed", coh.seeds, "seeds or ranges a-b")->delimiter(',');
    h->add_option("--out", coh.out, "report CSV (default stdout)");

    SparsityOptions sparsity;
    auto* p = app.add_subcommand("sparsity", "mean sparsity fraction per basis");
    p->add_option("--config", config_path, "flat key=value file; flags override it");
    add_file_options(*p, sparsity.source, "--input", "signal file (default: synthetic)");
    add_synth_options(*p, sparsity.source);
    p->add_option("--basis", sparsity.bases, "basis list")->delimiter(',');
    p->add_option("--n", sparsity.n, "block length");
    p->add_option("--threshold", sparsity.threshold, "fraction of the largest coefficient");
    p->add_option("--out", sparsity.out, "report CSV (default stdout)");

    SynthOptions synth;
    auto* y = app.add_subcommand("synth", "write a synthetic vibration signal");
    y->add_option("--config", config_path, "flat key=value file; flags override it");
    y->add_option("--tones", synth.tones, "f:a:phase list")->delimiter(',');
    y->add_option("--impulses", synth.impulses, "position:amplitude:decay list")->delimiter(',');
    y->add_option("--noise-db", synth.noise_db, "noise power relative to the strongest tone");
    y->add_option("--seed", synth.seed, "noise seed");
    y->add_option("--n", synth.n, "number of samples");
    y->add_option("--rate", synth.rate, "sample rate in Hz");
    y->add_option("--format", synth.format, "csv, raw_f32 or raw_f64");
    y->add_option("--out", synth.out, "output path")->required();

    std::vector<std::string> expanded;
    try {
        expanded = apply_config(args, app);
    } catch (const Error& ex) {
        err << "vibcs: " << to_string(ex.kind()) << " error: " << ex.what() << '\n';
        return exit_code_for(ex.kind());
    }

    try {
        std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
        if (!reversed.empty())
            reversed.pop_back();
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& ex) {
        err << "vibcs: " << ex.what() << '\n';
        return kExitUsage;
    }

    try {
        if (c->parsed())
            cmd_compress(compress, out);
        else if (r->parsed())
            cmd_reconstruct(reconstruct, out);
        else if (e->parsed())
            cmd_evaluate(evaluate, out);
        else if (s->parsed())
            cmd_sweep(sweep, out);
        else if (h->parsed())
            cmd_coherence(coh, out);
        else if (p->parsed())
            cmd_sparsity(sparsity, out);
        else if (y->parsed())
            cmd_synth(synth, out);
    } catch (const Error& ex) {
        err << "vibcs: " << to_string(ex.kind()) << " error: " << ex.what() << '\n';
        return exit_code_for(ex.kind());
    } catch (const std::exception& ex) {
        err << "vibcs: " << ex.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

} // namespace vibcs::cli
