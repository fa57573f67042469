#include "vibcs/measure.hpp"

#include "vibcs/error.hpp"
#include "vibcs/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace vibcs {

namespace {

// Partial Fisher-Yates over 0..n-1; only displaced slots are stored, so the
// cost is O(m) even for a huge n read from an untrusted header.
std::vector<std::uint32_t> draw_wang_indices(std::size_t m, std::size_t n, std::uint64_t seed) {
    std::unordered_map<std::size_t, std::uint32_t> moved;
    moved.reserve(2 * m);
    auto slot = [&](std::size_t k) {
        const auto it = moved.find(k);
        return it == moved.end() ? static_cast<std::uint32_t>(k) : it->second;
    };
    std::vector<std::uint32_t> out(m);
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + rng.bounded(n - i);
        out[i] = slot(j);
        moved[j] = slot(i);
    }
    return out;
}

// Calls fn(row_index, row) for each row of Phi in order. Dense kinds are
// regenerated from the seed; the generator is local to the call.
template <typename Fn>
void for_each_row(const MatrixSpec& spec, Fn&& fn) {
    const std::size_t m = spec.m();
    const std::size_t n = spec.n();
    std::vector<double> row(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    switch (spec.kind()) {
    case MatrixKind::gaussian: {
        NormalStream normals(spec.seed());
        for (std::size_t i = 0; i < m; ++i) {
            for (auto& v : row)
                v = normals.next() * scale;
            fn(i, std::span<const double>(row));
        }
        break;
    }
    case MatrixKind::bernoulli: {
        SplitMix64 rng(spec.seed());
        for (std::size_t i = 0; i < m; ++i) {
            for (auto& v : row)
                v = rng.bit() ? scale : -scale;
            fn(i, std::span<const double>(row));
        }
        break;
    }
    case MatrixKind::wang:
        for (std::size_t i = 0; i < m; ++i) {
            std::fill(row.begin(), row.end(), 0.0);
            row[spec.wang_indices()[i]] = 1.0;
            fn(i, std::span<const double>(row));
        }
        break;
    }
}

void check_cap(const MatrixSpec& spec, std::size_t max_entries) {
    if (spec.m() > max_entries / spec.n())
        throw Error(ErrorKind::resource,
                    "materializing " + std::to_string(spec.m()) + "x" + std::to_string(spec.n()) +
                        " exceeds the cap of " + std::to_string(max_entries) + " entries");
}

} // namespace

std::string_view to_string(MatrixKind kind) noexcept {
    switch (kind) {
    case MatrixKind::gaussian: return "gaussian";
    case MatrixKind::bernoulli: return "bernoulli";
    case MatrixKind::wang: return "wang";
    }
    return "unknown";
}

MatrixKind parse_matrix_kind(std::string_view name) {
    if (name == "gaussian") return MatrixKind::gaussian;
    if (name == "bernoulli") return MatrixKind::bernoulli;
    if (name == "wang") return MatrixKind::wang;
    throw Error(ErrorKind::parameter, "unknown matrix kind '" + std::string(name) + "'");
}

MatrixSpec::MatrixSpec(MatrixKind kind, std::size_t m, std::size_t n, std::uint64_t seed,
                       std::vector<std::uint32_t> wang_indices)
    : kind_(kind), m_(m), n_(n), seed_(seed), wang_indices_(std::move(wang_indices)) {
    if (static_cast<unsigned>(kind) > 2)
        throw Error(ErrorKind::parameter, "invalid matrix code");
    if (m == 0 || m > n)
        throw Error(ErrorKind::parameter, "measurement count must satisfy 1 <= m <= n (m=" +
                                              std::to_string(m) + ", n=" + std::to_string(n) + ")");
    if (kind != MatrixKind::wang) {
        if (!wang_indices_.empty())
            throw Error(ErrorKind::parameter, "row indices are only valid for the wang matrix");
        return;
    }
    if (wang_indices_.size() != m)
        throw Error(ErrorKind::parameter, "wang matrix needs exactly m row indices");
    std::unordered_set<std::uint32_t> seen;
    for (auto idx : wang_indices_) {
        if (idx >= n)
            throw Error(ErrorKind::parameter, "wang row index " + std::to_string(idx) +
                                                  " out of range for n=" + std::to_string(n));
        if (!seen.insert(idx).second)
            throw Error(ErrorKind::parameter,
                        "wang row index " + std::to_string(idx) + " repeated");
    }
}

bool MatrixSpec::matches_seed() const {
    if (kind_ != MatrixKind::wang)
        return true;
    return draw_wang_indices(m_, n_, seed_) == wang_indices_;
}

MatrixSpec build_matrix(MatrixKind kind, std::size_t m, std::size_t n, std::uint64_t seed) {
    if (m == 0 || m > n)
        throw Error(ErrorKind::parameter, "measurement count must satisfy 1 <= m <= n (m=" +
                                              std::to_string(m) + ", n=" + std::to_string(n) + ")");
    if (kind == MatrixKind::wang)
        return MatrixSpec(kind, m, n, seed, draw_wang_indices(m, n, seed));
    return MatrixSpec(kind, m, n, seed);
}

MeasurementVector apply_matrix(const MatrixSpec& spec, std::span<const double> x) {
    if (x.size() != spec.n())
        throw Error(ErrorKind::dimension, "block length " + std::to_string(x.size()) +
                                              " does not match matrix width " +
                                              std::to_string(spec.n()));
    MeasurementVector y{std::vector<double>(spec.m()), spec};
    if (spec.kind() == MatrixKind::wang) {
        for (std::size_t i = 0; i < spec.m(); ++i)
            y.values[i] = x[spec.wang_indices()[i]];
        return y;
    }
    for_each_row(spec, [&](std::size_t i, std::span<const double> row) {
        double acc = 0.0;
        for (std::size_t t = 0; t < row.size(); ++t)
            acc += row[t] * x[t];
        y.values[i] = acc;
    });
    return y;
}

std::vector<Complex> sensing_column(const MatrixSpec& spec, const BasisSpec& basis,
                                    std::size_t k) {
    if (spec.n() != basis.n())
        throw Error(ErrorKind::dimension, "matrix width and basis length differ");
    const auto atom = basis_column(basis, k);
    std::vector<Complex> col(spec.m());
    if (spec.kind() == MatrixKind::wang) {
        for (std::size_t i = 0; i < spec.m(); ++i)
            col[i] = atom[spec.wang_indices()[i]];
        return col;
    }
    for_each_row(spec, [&](std::size_t i, std::span<const double> row) {
        Complex acc = 0.0;
        for (std::size_t t = 0; t < row.size(); ++t)
            acc += row[t] * atom[t];
        col[i] = acc;
    });
    return col;
}

Eigen::MatrixXd materialize(const MatrixSpec& spec, std::size_t max_entries) {
    check_cap(spec, max_entries);
    Eigen::MatrixXd phi(spec.m(), spec.n());
    for_each_row(spec, [&](std::size_t i, std::span<const double> row) {
        for (std::size_t t = 0; t < row.size(); ++t)
            phi(i, t) = row[t];
    });
    return phi;
}

Eigen::MatrixXcd sensing_matrix(const MatrixSpec& spec, const BasisSpec& basis,
                                std::size_t max_entries) {
    if (spec.n() != basis.n())
        throw Error(ErrorKind::dimension, "matrix width and basis length differ");
    check_cap(spec, max_entries);
    Eigen::MatrixXcd a(spec.m(), spec.n());
    for_each_row(spec, [&](std::size_t i, std::span<const double> row) {
        // <psi_k, phi_i> conjugated gives sum_t phi_i[t] psi_k[t].
        const auto coeffs = analyze(row, basis);
        for (std::size_t k = 0; k < coeffs.values.size(); ++k)
            a(i, k) = std::conj(coeffs.values[k]);
    });
    return a;
}

} // namespace vibcs
