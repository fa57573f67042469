#include "support.hpp"

#include "commands.hpp"

#include "vibcs/io.hpp"
#include "vibcs/measure.hpp"
#include "vibcs/metrics.hpp"
#include "vibcs/recover.hpp"
#include "vibcs/transforms.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <sys/wait.h>

using namespace vibcs;
using namespace testing_support;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 6) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::map<std::string, std::string>> parse_report(const std::string& text) {
    auto split = [](const std::string& s) {
        std::vector<std::string> cells(1);
        for (char c : s)
            if (c == ',')
                cells.emplace_back();
            else
                cells.back().push_back(c);
        return cells;
    };
    std::istringstream in(text);
    std::string line;
    std::vector<std::map<std::string, std::string>> rows;
    if (!std::getline(in, line))
        return rows;
    const auto header = split(line);
    while (std::getline(in, line)) {
        const auto cells = split(line);
        std::map<std::string, std::string> r;
        for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i)
            r[header[i]] = cells[i];
        rows.push_back(r);
    }
    return rows;
}

int cli_run(std::vector<std::string> args, std::string* err_text = nullptr) {
    args.insert(args.begin(), "vibcs");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (err_text)
        *err_text = err.str();
    else if (code != 0)
        std::cerr << err.str();
    return code;
}

int run_process(const std::string& command) {
    const int raw = std::system(command.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

// ------------------------------------------------------------------ 1

Verdict wang_coherence() {
    const auto t0 = Clock::now();
    double worst_dft = 0, worst_dct = 0, dct_value = 0;
    bool decimals = true;
    for (std::size_t n : {64u, 1024u})
        for (std::size_t m : {n / 10, n / 2})
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                const auto spec = build_matrix(MatrixKind::wang, m, n, seed);
                const double dft = coherence(spec, BasisSpec(BasisKind::dft, n));
                const double dct = coherence(spec, BasisSpec(BasisKind::dct, n));
                worst_dft = std::max(worst_dft, std::abs(dft - 1.0));
                worst_dct = std::max(worst_dct, std::abs(dct - std::numbers::sqrt2));
                dct_value = dct;
                decimals = decimals && std::round(dft * 100) == 100 && std::round(dct * 100) == 141;
            }
    const double secs = seconds_since(t0);
    return {worst_dft <= 1e-9 && worst_dct <= 1e-9 && decimals && secs < 1.0,
            "max|mu_dft-1|=" + fmt(worst_dft, 3) + " max|mu_dct-sqrt2|=" + fmt(worst_dct, 3) +
                " (mu_dct at n=1024: " + fmt(dct_value, 12) + ") two-decimal match=" +
                (decimals ? "yes" : "no") + " time=" + fmt(secs, 3) + "s"};
}

// ------------------------------------------------------------------ 2

Verdict random_matrix_coherence() {
    const std::size_t n = 1024, m = 103;
    bool pass = true;
    std::string detail;
    for (auto basis_kind : {BasisKind::dct, BasisKind::dft}) {
        const BasisSpec basis(basis_kind, n);
        std::map<MatrixKind, double> mean;
        std::map<MatrixKind, double> lowest;
        for (auto kind : {MatrixKind::gaussian, MatrixKind::bernoulli, MatrixKind::wang}) {
            lowest[kind] = INFINITY;
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                const double mu = coherence(build_matrix(kind, m, n, seed), basis);
                mean[kind] += mu / 10;
                lowest[kind] = std::min(lowest[kind], mu);
            }
        }
        const double wang_mean = mean[MatrixKind::wang];
        for (auto kind : {MatrixKind::gaussian, MatrixKind::bernoulli})
            pass = pass && lowest[kind] > 3.0 && lowest[kind] >= wang_mean + 1.5;
        const double g = mean[MatrixKind::gaussian], b = mean[MatrixKind::bernoulli];
        const double spread = std::abs(g - b) / std::max(g, b);
        pass = pass && spread <= 0.15;
        detail += std::string(to_string(basis_kind)) + ": gaussian=" + fmt(g, 4) + " (min " +
                  fmt(lowest[MatrixKind::gaussian], 4) + ") bernoulli=" + fmt(b, 4) + " (min " +
                  fmt(lowest[MatrixKind::bernoulli], 4) + ") wang=" + fmt(wang_mean, 4) +
                  " spread=" + fmt(100 * spread, 3) + "%; ";
    }
    return {pass, detail};
}

// ------------------------------------------------------------------ 3

const char* kGearTones = "330:1.0:0.3,346:0.6:1.1,1900:0.35:2.0";

bool run_sweep(const std::filesystem::path& out) {
    return cli_run({"sweep", "--tones", kGearTones, "--noise-db", "-30", "--synth-seed", "1", "--rate", "20000",
                    "--n", "1024", "--basis", "dft", "--matrix", "gaussian,bernoulli,wang", "--cr",
                    "3,5,10,20,30", "--seeds", "1-10", "--out", out.string()}) == 0;
}

Verdict snr_sweep(const std::filesystem::path& report) {
    const auto t0 = Clock::now();
    if (!run_sweep(report))
        return {false, "sweep command failed"};
    const double secs = seconds_since(t0);
    std::map<std::string, std::map<double, double>> mean;
    for (const auto& r : parse_report(slurp(report)))
        mean[r.at("matrix")][std::stod(r.at("cr_percent"))] += std::stod(r.at("snr_db")) / 10;
    bool wang_best = true, monotone = true;
    std::string detail;
    for (auto& [matrix, by_cr] : mean) {
        detail += matrix + "[";
        double prev = -INFINITY;
        for (auto [cr, snr] : by_cr) {
            detail += fmt(cr) + ":" + fmt(snr, 4) + " ";
            monotone = monotone && snr >= prev;
            prev = snr;
        }
        detail.back() = ']';
        detail += ' ';
    }
    for (auto [cr, snr] : mean["wang"])
        wang_best = wang_best && snr >= mean["gaussian"][cr] && snr >= mean["bernoulli"][cr];
    if (mean.size() != 3 || mean["wang"].size() != 5)
        return {false, "unexpected report shape"};
    return {wang_best && monotone && secs < 60.0,
            detail + "wang>=others at every CR=" + (wang_best ? "yes" : "no") +
                " non-decreasing=" + (monotone ? "yes" : "no") + " time=" + fmt(secs, 3) + "s"};
}

// ------------------------------------------------------------------ 4

Verdict exact_recovery() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(31415);
    int exact = 0;
    double worst = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto c = random_dct_sparse(rng, 256, 5);
        const auto spec = build_matrix(MatrixKind::gaussian, 64, 256, rng());
        const auto r = omp_solve(apply_matrix(spec, c.x), BasisSpec(BasisKind::dct, 256), spec);
        auto support = r.support;
        std::sort(support.begin(), support.end());
        if (support == c.support) {
            ++exact;
            worst = std::max(worst, rel_error(r.x_hat, c.x));
        }
    }
    const double secs = seconds_since(t0);
    return {exact >= 48 && worst <= 1e-8 && secs < 10.0,
            "exact supports " + std::to_string(exact) + "/50, worst rel error " + fmt(worst, 3) +
                " time=" + fmt(secs, 3) + "s"};
}

// ------------------------------------------------------------------ 5

Verdict transform_integrity() {
    std::mt19937_64 rng(5);
    double worst_rt = 0, worst_parseval = 0, worst_gram = 0;
    for (auto kind : {BasisKind::dct, BasisKind::dft, BasisKind::db2, BasisKind::db8}) {
        for (std::size_t n : {64u, 256u, 1024u}) {
            const BasisSpec basis(kind, n);
            for (int i = 0; i < 200; ++i) {
                const auto x = random_block(rng, n);
                const auto s = analyze(x, basis);
                worst_rt = std::max(worst_rt, rel_error(synthesize(s), x));
                worst_parseval = std::max(worst_parseval, std::abs(norm(s.values) - norm(x)) / norm(x));
            }
        }
        for (std::size_t n : {4u, 16u, 64u}) {
            if (kind == BasisKind::db8 && n < 16)
                continue;
            const BasisSpec basis(kind, n);
            std::vector<std::vector<Complex>> cols;
            for (std::size_t k = 0; k < n; ++k)
                cols.push_back(basis_column(basis, k));
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) {
                    Complex dot = 0;
                    for (std::size_t t = 0; t < n; ++t)
                        dot += std::conj(cols[a][t]) * cols[b][t];
                    worst_gram = std::max(worst_gram, std::abs(dot - (a == b ? 1.0 : 0.0)));
                }
        }
    }
    return {worst_rt <= 1e-10 && worst_parseval <= 1e-10 && worst_gram <= 1e-9,
            "round-trip " + fmt(worst_rt, 3) + ", Parseval " + fmt(worst_parseval, 3) + ", Gram " +
                fmt(worst_gram, 3) + " over dct/dft/db2/db8"};
}

// ------------------------------------------------------------------ 6

std::string fault_impulses() {
    std::string list;
    for (int i = 0; i < 8; ++i)
        list += (i ? "," : "") + std::to_string(300 + 1024 * i) + ":5:0.05";
    return list;
}

// Per seed: synthesize, compress at CR 10 with Wang + DFT, reconstruct and
// evaluate both signals; returns false when any command fails.
bool run_fault_study(const std::filesystem::path& report) {
    TempDir dir;
    std::string text = "seed,kurt_orig_healthy,kurt_orig_faulty,kurt_rec_healthy,kurt_rec_faulty\n";
    for (int seed = 1; seed <= 10; ++seed) {
        const std::string s = std::to_string(seed);
        std::map<std::string, std::map<std::string, std::string>> metrics;
        for (const std::string state : {"healthy", "faulty"}) {
            const auto orig = dir / (state + s + ".csv");
            const auto box = dir / (state + s + ".csvb");
            const auto rec = dir / (state + s + "_rec.csv");
            const auto eval = dir / (state + s + "_eval.csv");
            std::vector<std::string> synth = {"synth",   "--tones", kGearTones, "--noise-db", "-30", "--seed", s,
                                              "--n",     "8192",    "--rate",   "20000",      "--out", orig.string()};
            if (state == "faulty")
                synth.insert(synth.end(), {"--impulses", fault_impulses()});
            if (cli_run(synth) != 0 ||
                cli_run({"compress", "--input", orig.string(), "--rate", "20000", "--basis", "dft", "--matrix",
                         "wang", "--cr", "10", "--seed", s, "--n", "1024", "--out", box.string()}) != 0 ||
                cli_run({"reconstruct", "--input", box.string(), "--out", rec.string()}) != 0 ||
                cli_run({"evaluate", "--original", orig.string(), "--reconstructed", rec.string(), "--out",
                         eval.string()}) != 0)
                return false;
            metrics[state] = parse_report(slurp(eval)).at(0);
        }
        text += s + ',' + metrics["healthy"]["kurt_orig"] + ',' + metrics["faulty"]["kurt_orig"] + ',' +
                metrics["healthy"]["kurt_rec"] + ',' + metrics["faulty"]["kurt_rec"] + '\n';
    }
    std::ofstream(report, std::ios::binary) << text;
    return true;
}

Verdict fault_kurtosis(const std::filesystem::path& report) {
    if (!run_fault_study(report))
        return {false, "pipeline command failed"};
    int ordered = 0, total = 0;
    double min_gap_orig = INFINITY, min_gap_rec = INFINITY;
    for (const auto& r : parse_report(slurp(report))) {
        ++total;
        const double oh = std::stod(r.at("kurt_orig_healthy")), of = std::stod(r.at("kurt_orig_faulty"));
        const double rh = std::stod(r.at("kurt_rec_healthy")), rf = std::stod(r.at("kurt_rec_faulty"));
        min_gap_orig = std::min(min_gap_orig, of - oh);
        min_gap_rec = std::min(min_gap_rec, rf - rh);
        if (of > oh && rf > rh)
            ++ordered;
    }
    return {total == 10 && ordered == 10,
            std::to_string(ordered) + "/" + std::to_string(total) +
                " seeds with faulty > healthy for original and reconstruction; min gap original " +
                fmt(min_gap_orig, 4) + ", reconstructed " + fmt(min_gap_rec, 4)};
}

// ------------------------------------------------------------------ 7

Verdict container_format() {
    TempDir dir;
    std::mt19937_64 rng(8);
    const BasisKind bases[] = {BasisKind::dct, BasisKind::dft, BasisKind::db2, BasisKind::db8};
    const MatrixKind matrices[] = {MatrixKind::gaussian, MatrixKind::bernoulli, MatrixKind::wang};

    int round_trips = 0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = std::size_t{1} << (2 + rng() % 9);
        const std::size_t m = 1 + rng() % n;
        CompressedContainer c{BasisSpec(bases[rng() % 4], n), build_matrix(matrices[rng() % 3], m, n, rng()),
                              1.0 + static_cast<double>(rng() % 96000), {}};
        const std::size_t segments = rng() % 4;
        for (std::size_t s = 0; s < segments; ++s)
            c.segments.push_back({static_cast<std::uint32_t>(s + 1 == segments ? 1 + rng() % n : n),
                                  random_block(rng, m)});
        const auto path = dir / ("r" + std::to_string(i) + ".csvb");
        write_container(path, c);
        const auto back = read_container(path);
        const auto on_disk = slurp(path);
        const auto re_encoded = encode_container(back);
        if (back == c && on_disk == std::string(re_encoded.begin(), re_encoded.end()))
            ++round_trips;
    }

    // Reconstruction in a separate process must match the in-process result.
    double worst_cross = 0;
    bool cross_ok = true;
    int case_id = 0;
    for (auto basis : {"dct", "dft", "db8"})
        for (auto matrix : {"gaussian", "wang"}) {
            const std::string id = std::to_string(case_id++);
            const auto sig = dir / ("x" + id + ".csv");
            const auto box = dir / ("x" + id + ".csvb");
            const auto mine = dir / ("x" + id + "_in.csv");
            const auto theirs = dir / ("x" + id + "_out.csv");
            cross_ok = cross_ok &&
                       cli_run({"synth", "--tones", kGearTones, "--noise-db", "-30", "--seed", id, "--n", "2500",
                                "--out", sig.string()}) == 0 &&
                       cli_run({"compress", "--input", sig.string(), "--basis", basis, "--matrix", matrix, "--cr",
                                "20", "--seed", id, "--n", "512", "--out", box.string()}) == 0 &&
                       cli_run({"reconstruct", "--input", box.string(), "--out", mine.string()}) == 0 &&
                       run_process(std::string(VIBCS_CLI_PATH) + " reconstruct --input " + box.string() +
                                   " --out " + theirs.string() + " >/dev/null") == 0;
            if (!cross_ok)
                break;
            const auto a = read_signal(mine, SignalFormat::csv).samples;
            const auto b = read_signal(theirs, SignalFormat::csv).samples;
            if (a.size() != b.size() || a.size() != 2500) {
                cross_ok = false;
                break;
            }
            for (std::size_t i = 0; i < a.size(); ++i)
                worst_cross = std::max(worst_cross, std::abs(a[i] - b[i]));
        }

    // Header corruption: every single-bit flip of the structural fields, the
    // Wang seed and the stored row indices, plus invalid rates and lengths.
    const std::size_t n = 256, m = 32;
    CompressedContainer good{BasisSpec(BasisKind::dft, n), build_matrix(MatrixKind::wang, m, n, 99), 20000.0, {}};
    for (std::uint32_t len : {256u, 100u})
        good.segments.push_back({len, random_block(rng, m)});
    const auto bytes = encode_container(good);
    int attempted = 0, rejected = 0, aliases = 0;
    auto probe = [&](const std::vector<std::uint8_t>& bad) {
        ++attempted;
        try {
            decode_container(bad);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::format || e.kind() == ErrorKind::integrity)
                ++rejected;
        }
    };
    for (std::size_t byte = 0; byte < kContainerHeaderBytes + 4 * m; ++byte) {
        if (byte >= 24 && byte < 32)
            continue; // sample rate, probed below
        for (int bit = 0; bit < 8; ++bit) {
            auto bad = bytes;
            bad[byte] ^= static_cast<std::uint8_t>(1u << bit);
            if (byte == 6 && bad[6] <= 3) {
                ++aliases; // another valid basis code
                continue;
            }
            probe(bad);
        }
    }
    for (double rate : {0.0, -20000.0, std::nan(""), HUGE_VAL, -HUGE_VAL}) {
        auto bad = bytes;
        std::memcpy(bad.data() + 24, &rate, 8);
        probe(bad);
    }
    {
        auto bad = bytes;
        bad[31] ^= 0x80;
        probe(bad);
    }
    for (std::size_t cut : {std::size_t{0}, std::size_t{3}, kContainerHeaderBytes - 1, bytes.size() - 1}) {
        probe(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(cut)));
    }
    {
        auto bad = bytes;
        bad.push_back(0);
        probe(bad);
    }

    const bool pass = round_trips == 100 && cross_ok && worst_cross <= 1e-12 && rejected == attempted;
    return {pass, std::to_string(round_trips) + "/100 bitwise round trips; cross-process max diff " +
                      (cross_ok ? fmt(worst_cross, 3) : std::string("n/a (command failed)")) + "; " +
                      std::to_string(rejected) + "/" + std::to_string(attempted) +
                      " corrupted headers rejected (" + std::to_string(aliases) +
                      " basis-code flips land on another valid basis and are not probed)"};
}

// ------------------------------------------------------------------ 8

Verdict determinism(const std::filesystem::path& dir) {
    const auto sweep_again = dir / "criterion3_sweep_rerun.csv";
    const auto fault_again = dir / "criterion6_kurtosis_rerun.csv";
    if (!run_sweep(sweep_again) || !run_fault_study(fault_again))
        return {false, "rerun failed"};
    const bool sweep_same = slurp(dir / "criterion3_sweep.csv") == slurp(sweep_again);
    const bool fault_same = slurp(dir / "criterion6_kurtosis.csv") == slurp(fault_again);
    return {sweep_same && fault_same && !slurp(sweep_again).empty(),
            std::string("sweep report identical=") + (sweep_same ? "yes" : "no") +
                ", kurtosis report identical=" + (fault_same ? "yes" : "no")};
}

} // namespace

int main(int argc, char** argv) {
    const std::filesystem::path reports = argc > 1 ? argv[1] : "acceptance_reports";
    std::filesystem::create_directories(reports);

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"Wang coherence exact (1 with DFT, sqrt2 with DCT)", wang_coherence},
        {"Random-matrix coherence band and ordering", random_matrix_coherence},
        {"SNR sweep: Wang best at every CR, non-decreasing in CR",
         [&] { return snr_sweep(reports / "criterion3_sweep.csv"); }},
        {"Exact sparse recovery, 50 trials", exact_recovery},
        {"Transform round-trip, Parseval and Gram identity", transform_integrity},
        {"Fault kurtosis ordering survives CR 10 Wang+DFT", [&] { return fault_kurtosis(reports / "criterion6_kurtosis.csv"); }},
        {"Container round trip, cross-process reconstruction, corruption", container_format},
        {"Deterministic reports for criteria 3 and 6", [&] { return determinism(reports); }},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = Clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass)
            ++failed;
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " | "
                  << v.detail << " [" << fmt(seconds_since(t0), 3) << " s]" << std::endl;
    }
    std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size()
              << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
