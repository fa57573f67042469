#include "vibcs/transforms.hpp"

#include "vibcs/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

namespace vibcs {

namespace {

// Daubechies minimum-phase scaling filters (Daubechies, "Ten Lectures on
// Wavelets", 1992, Table 6.1), normalized to sum sqrt(2), 15 significant
// digits.
constexpr std::array<double, 4> kDb2 = {
    0.482962913144534, 0.836516303737808, 0.224143868042013, -0.129409522551260,
};

constexpr std::array<double, 16> kDb8 = {
    0.0544158422431040,   0.312871590914300,   0.675630736297290,
    0.585354683654207,    -0.0158291052563493, -0.284015542961547,
    0.000472484573913283, 0.128747426620478,   -0.0173693010018075,
    -0.0440882539307948,  0.0139810279173983,  0.00874609404740578,
    -0.00487035299345157, -0.000391740373376947, 0.000675449406450569,
    -0.000117476784124770,
};

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// FFTW plans are created once per (kind, n) under a lock and executed with the
// new-array interface, which is thread-safe.
class FftPlans {
public:
    FftPlans(BasisKind kind, std::size_t n) {
        const int len = static_cast<int>(n);
        constexpr unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        if (kind == BasisKind::dft) {
            auto* in = fftw_alloc_complex(n);
            auto* out = fftw_alloc_complex(n);
            forward_ = fftw_plan_dft_1d(len, in, out, FFTW_FORWARD, flags);
            backward_ = fftw_plan_dft_1d(len, in, out, FFTW_BACKWARD, flags);
            fftw_free(in);
            fftw_free(out);
        } else {
            auto* in = fftw_alloc_real(n);
            auto* out = fftw_alloc_real(n);
            forward_ = fftw_plan_r2r_1d(len, in, out, FFTW_REDFT10, flags);
            backward_ = fftw_plan_r2r_1d(len, in, out, FFTW_REDFT01, flags);
            fftw_free(in);
            fftw_free(out);
        }
        if (forward_ == nullptr || backward_ == nullptr)
            throw Error(ErrorKind::resource, "FFTW planning failed for n=" + std::to_string(n));
    }

    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

    ~FftPlans() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    void dft(const Complex* in, Complex* out, bool forward) const {
        // std::complex<double> is layout-compatible with fftw_complex.
        auto* src = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in));
        auto* dst = reinterpret_cast<fftw_complex*>(out);
        fftw_execute_dft(forward ? forward_ : backward_, src, dst);
    }

    void dct(const double* in, double* out, bool forward) const {
        fftw_execute_r2r(forward ? forward_ : backward_, const_cast<double*>(in), out);
    }

    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }

private:
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

const FftPlans& plans_for(BasisKind kind, std::size_t n) {
    // The mutex must outlive the cache: plan destructors lock it at exit.
    auto& mutex = FftPlans::planner_mutex();
    static std::map<std::pair<BasisKind, std::size_t>, std::unique_ptr<FftPlans>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{kind, n}];
    if (!slot)
        slot = std::make_unique<FftPlans>(kind, n);
    return *slot;
}

std::vector<Complex> dft_analyze(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<Complex> in(x.begin(), x.end());
    std::vector<Complex> out(n);
    plans_for(BasisKind::dft, n).dft(in.data(), out.data(), true);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& c : out)
        c *= scale;
    return out;
}

std::vector<double> dct_analyze(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> out(n);
    plans_for(BasisKind::dct, n).dct(x.data(), out.data(), true);
    // REDFT10 returns 2 * sum x_t cos(pi k (2t+1) / 2n).
    const double a0 = 0.5 * std::sqrt(1.0 / static_cast<double>(n));
    const double ak = 0.5 * std::sqrt(2.0 / static_cast<double>(n));
    out[0] *= a0;
    for (std::size_t k = 1; k < n; ++k)
        out[k] *= ak;
    return out;
}

std::vector<double> dct_synthesize(std::span<const Complex> s) {
    const std::size_t n = s.size();
    // REDFT01 computes Y_0 + 2 sum_{k>=1} Y_k cos(pi k (2t+1) / 2n).
    std::vector<double> in(n);
    in[0] = s[0].real() * std::sqrt(1.0 / static_cast<double>(n));
    const double ak = 0.5 * std::sqrt(2.0 / static_cast<double>(n));
    for (std::size_t k = 1; k < n; ++k)
        in[k] = s[k].real() * ak;
    std::vector<double> out(n);
    plans_for(BasisKind::dct, n).dct(in.data(), out.data(), false);
    return out;
}

std::vector<double> dft_synthesize(std::span<const Complex> s) {
    const std::size_t n = s.size();
    std::vector<Complex> sym(n);
    for (std::size_t k = 0; k < n; ++k)
        sym[k] = 0.5 * (s[k] + std::conj(s[(n - k) % n]));
    std::vector<Complex> out(n);
    plans_for(BasisKind::dft, n).dft(sym.data(), out.data(), false);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t)
        x[t] = out[t].real() * scale;
    return x;
}

// Periodic Mallat pyramid, full depth.
std::vector<double> wavelet_analyze(std::span<const double> x, std::span<const double> h) {
    const std::size_t taps = h.size();
    std::vector<double> g(taps);
    for (std::size_t k = 0; k < taps; ++k)
        g[k] = (k % 2 == 0 ? 1.0 : -1.0) * h[taps - 1 - k];

    std::vector<double> out(x.size());
    std::vector<double> approx(x.begin(), x.end());
    std::vector<double> next;
    for (std::size_t len = x.size(); len > 1; len /= 2) {
        const std::size_t half = len / 2;
        next.assign(half, 0.0);
        for (std::size_t i = 0; i < half; ++i) {
            double a = 0.0;
            double d = 0.0;
            for (std::size_t k = 0; k < taps; ++k) {
                const double v = approx[(2 * i + k) % len];
                a += h[k] * v;
                d += g[k] * v;
            }
            next[i] = a;
            out[half + i] = d;
        }
        approx.swap(next);
    }
    out[0] = approx[0];
    return out;
}

std::vector<double> wavelet_synthesize(std::span<const Complex> s, std::span<const double> h) {
    const std::size_t taps = h.size();
    std::vector<double> g(taps);
    for (std::size_t k = 0; k < taps; ++k)
        g[k] = (k % 2 == 0 ? 1.0 : -1.0) * h[taps - 1 - k];

    std::vector<double> approx{s[0].real()};
    std::vector<double> next;
    for (std::size_t len = 1; len < s.size(); len *= 2) {
        const std::size_t full = 2 * len;
        next.assign(full, 0.0);
        for (std::size_t i = 0; i < len; ++i) {
            const double a = approx[i];
            const double d = s[len + i].real();
            for (std::size_t k = 0; k < taps; ++k)
                next[(2 * i + k) % full] += h[k] * a + g[k] * d;
        }
        approx.swap(next);
    }
    return approx;
}

void check_symmetry(const CoefficientVector& s) {
    const std::size_t n = s.values.size();
    double peak = 0.0;
    for (const auto& c : s.values)
        peak = std::max(peak, std::abs(c));
    const double tol = 1e-8 * std::max(1.0, peak);
    for (std::size_t k = 0; k < n; ++k) {
        const Complex mirror = s.basis.is_complex() ? std::conj(s.values[(n - k) % n])
                                                    : std::conj(s.values[k]);
        if (std::abs(s.values[k] - mirror) > tol)
            throw Error(ErrorKind::symmetry,
                        "coefficient " + std::to_string(k) + " breaks the symmetry required "
                        "for a real signal in basis " + std::string(to_string(s.basis.kind())));
    }
}

} // namespace

std::string_view to_string(BasisKind kind) noexcept {
    switch (kind) {
    case BasisKind::dct: return "dct";
    case BasisKind::dft: return "dft";
    case BasisKind::db2: return "db2";
    case BasisKind::db8: return "db8";
    }
    return "unknown";
}

BasisKind parse_basis_kind(std::string_view name) {
    if (name == "dct") return BasisKind::dct;
    if (name == "dft") return BasisKind::dft;
    if (name == "db2") return BasisKind::db2;
    if (name == "db8") return BasisKind::db8;
    throw Error(ErrorKind::parameter, "unknown basis '" + std::string(name) + "'");
}

BasisSpec::BasisSpec(BasisKind kind, std::size_t n) : kind_(kind), n_(n) {
    if (static_cast<unsigned>(kind) > 3)
        throw Error(ErrorKind::parameter, "invalid basis code");
    if (n < 2)
        throw Error(ErrorKind::parameter, "basis length must be >= 2, got " + std::to_string(n));
    if ((kind == BasisKind::db2 || kind == BasisKind::db8) && !is_power_of_two(n))
        throw Error(ErrorKind::parameter,
                    "wavelet bases need a power-of-two length, got " + std::to_string(n));
}

std::span<const double> daubechies_lowpass(BasisKind kind) {
    switch (kind) {
    case BasisKind::db2: return kDb2;
    case BasisKind::db8: return kDb8;
    default: throw Error(ErrorKind::parameter, "not a wavelet basis");
    }
}

CoefficientVector analyze(std::span<const double> x, const BasisSpec& basis) {
    if (x.size() != basis.n())
        throw Error(ErrorKind::dimension, "block length " + std::to_string(x.size()) +
                                              " does not match basis length " +
                                              std::to_string(basis.n()));
    CoefficientVector s{basis, {}};
    switch (basis.kind()) {
    case BasisKind::dft:
        s.values = dft_analyze(x);
        break;
    case BasisKind::dct: {
        auto c = dct_analyze(x);
        s.values.assign(c.begin(), c.end());
        break;
    }
    case BasisKind::db2:
    case BasisKind::db8: {
        auto c = wavelet_analyze(x, daubechies_lowpass(basis.kind()));
        s.values.assign(c.begin(), c.end());
        break;
    }
    }
    return s;
}

std::vector<double> synthesize(const CoefficientVector& s) {
    if (s.values.size() != s.basis.n())
        throw Error(ErrorKind::dimension, "coefficient count " + std::to_string(s.values.size()) +
                                              " does not match basis length " +
                                              std::to_string(s.basis.n()));
    check_symmetry(s);
    switch (s.basis.kind()) {
    case BasisKind::dft: return dft_synthesize(s.values);
    case BasisKind::dct: return dct_synthesize(s.values);
    case BasisKind::db2:
    case BasisKind::db8: return wavelet_synthesize(s.values, daubechies_lowpass(s.basis.kind()));
    }
    return {};
}

std::vector<Complex> basis_column(const BasisSpec& basis, std::size_t k) {
    const std::size_t n = basis.n();
    if (k >= n)
        throw Error(ErrorKind::index,
                    "atom " + std::to_string(k) + " out of range for n=" + std::to_string(n));
    if (basis.kind() == BasisKind::dft) {
        std::vector<Complex> col(n);
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        for (std::size_t t = 0; t < n; ++t) {
            // Reduce k*t mod n in integers to keep the angle exact.
            const double angle = 2.0 * std::numbers::pi * static_cast<double>((k * t) % n) /
                                 static_cast<double>(n);
            col[t] = std::polar(scale, angle);
        }
        return col;
    }
    CoefficientVector unit{basis, std::vector<Complex>(n)};
    unit.values[k] = 1.0;
    const auto x = synthesize(unit);
    return {x.begin(), x.end()};
}

} // namespace vibcs
