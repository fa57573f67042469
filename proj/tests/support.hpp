#pragma once

#include "vibcs/transforms.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace testing_support {

using Complex = std::complex<double>;

// Direct unitary DFT, summed in long double.
inline std::vector<Complex> naive_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<Complex> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        long double re = 0, im = 0;
        for (std::size_t t = 0; t < n; ++t) {
            const long double a = -2.0L * std::numbers::pi_v<long double> *
                                  static_cast<long double>((k * t) % n) / static_cast<long double>(n);
            re += x[t] * std::cos(a);
            im += x[t] * std::sin(a);
        }
        const long double s = 1.0L / std::sqrt(static_cast<long double>(n));
        out[k] = Complex(static_cast<double>(re * s), static_cast<double>(im * s));
    }
    return out;
}

// Orthonormal DCT-II atom k evaluated from its closed form.
inline std::vector<double> dct_atom(std::size_t n, std::size_t k) {
    std::vector<double> v(n);
    const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (std::size_t t = 0; t < n; ++t)
        v[t] = scale * std::cos(std::numbers::pi * (2.0 * t + 1.0) * k / (2.0 * n));
    return v;
}

// Db2 lowpass taps from the closed form (1 +- sqrt3, 3 +- sqrt3) / (4 sqrt2).
inline std::vector<double> db2_closed_form() {
    const double r3 = std::sqrt(3.0);
    const double d = 4.0 * std::numbers::sqrt2;
    return {(1 + r3) / d, (3 + r3) / d, (3 - r3) / d, (1 - r3) / d};
}

// One periodic synthesis level as an explicit len x len/2 matrix:
// output[(2i + k) mod len] += h[k] * input[i].
inline Eigen::MatrixXd upsample_filter(const std::vector<double>& h, std::size_t len) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(len, len / 2);
    for (std::size_t i = 0; i < len / 2; ++i)
        for (std::size_t k = 0; k < h.size(); ++k)
            s((2 * i + k) % len, i) += h[k];
    return s;
}

inline std::vector<double> random_block(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> dist;
    std::vector<double> x(n);
    for (auto& v : x)
        v = dist(rng);
    return x;
}

inline double norm(const std::vector<double>& x) {
    double s = 0;
    for (double v : x)
        s += v * v;
    return std::sqrt(s);
}

inline double norm(const std::vector<Complex>& x) {
    double s = 0;
    for (auto v : x)
        s += std::norm(v);
    return std::sqrt(s);
}

inline double rel_error(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        d[i] = a[i] - b[i];
    return norm(d) / norm(b);
}

struct SparseCase {
    std::vector<double> x;
    std::vector<std::size_t> support;
};

// K random DCT slots with magnitudes in [1, 2] and random signs.
inline SparseCase random_dct_sparse(std::mt19937_64& rng, std::size_t n, std::size_t k) {
    std::vector<std::size_t> slots(n);
    std::iota(slots.begin(), slots.end(), 0);
    std::shuffle(slots.begin(), slots.end(), rng);
    slots.resize(k);
    std::sort(slots.begin(), slots.end());
    std::uniform_real_distribution<double> mag(1.0, 2.0);
    std::vector<Complex> s(n);
    for (auto i : slots)
        s[i] = (rng() & 1 ? 1.0 : -1.0) * mag(rng);
    return {vibcs::synthesize({vibcs::BasisSpec(vibcs::BasisKind::dct, n), s}), slots};
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("vibcs_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace testing_support
