#pragma once

#include "vibcs/transforms.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace vibcs {

/// Measurement-matrix families. Values are the on-disk container codes.
enum class MatrixKind : std::uint8_t { gaussian = 0, bernoulli = 1, wang = 2 };

std::string_view to_string(MatrixKind kind) noexcept;
MatrixKind parse_matrix_kind(std::string_view name);

inline constexpr std::size_t kDefaultMaterializeCap = std::size_t{1} << 24;

/// Descriptor of an M x N measurement matrix. Gaussian and Bernoulli entries
/// are regenerated from the seed on demand; Wang keeps its row indices.
class MatrixSpec {
public:
    /// Validates and stores explicit Wang indices (must be empty for the
    /// other kinds). Does not check them against the seed; see
    /// `matches_seed`.
    MatrixSpec(MatrixKind kind, std::size_t m, std::size_t n, std::uint64_t seed,
               std::vector<std::uint32_t> wang_indices = {});

    MatrixKind kind() const noexcept { return kind_; }
    std::size_t m() const noexcept { return m_; }
    std::size_t n() const noexcept { return n_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<std::uint32_t>& wang_indices() const noexcept { return wang_indices_; }

    /// True when regenerating from (kind, m, n, seed) reproduces this spec.
    bool matches_seed() const;

    friend bool operator==(const MatrixSpec&, const MatrixSpec&) = default;

private:
    MatrixKind kind_;
    std::size_t m_;
    std::size_t n_;
    std::uint64_t seed_;
    std::vector<std::uint32_t> wang_indices_;
};

/// Deterministic construction from the SplitMix64 stream seeded with `seed`:
///  - gaussian: row-major i.i.d. N(0, 1/m) entries via Box-Muller pairs;
///  - bernoulli: row-major +-1/sqrt(m) from the top bit (set => +);
///  - wang: partial Fisher-Yates over [0, n), first m slots in draw order.
MatrixSpec build_matrix(MatrixKind kind, std::size_t m, std::size_t n, std::uint64_t seed);

struct MeasurementVector {
    std::vector<double> values;
    MatrixSpec spec;
};

/// y = Phi x (named to stay clear of std::apply under ADL). Wang measurements are copies of the selected samples.
MeasurementVector apply_matrix(const MatrixSpec& spec, std::span<const double> x);

/// Column k of Phi Psi (length m).
std::vector<Complex> sensing_column(const MatrixSpec& spec, const BasisSpec& basis,
                                    std::size_t k);

/// Dense Phi. Throws ErrorKind::resource when m * n exceeds `max_entries`.
Eigen::MatrixXd materialize(const MatrixSpec& spec,
                            std::size_t max_entries = kDefaultMaterializeCap);

/// Dense Phi Psi, row j computed as conj(analyze(phi_j)).
Eigen::MatrixXcd sensing_matrix(const MatrixSpec& spec, const BasisSpec& basis,
                                std::size_t max_entries = kDefaultMaterializeCap);

} // namespace vibcs
