#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace vibcs {

using Complex = std::complex<double>;

/// Sparsifying bases. The numeric values are the on-disk container codes.
enum class BasisKind : std::uint8_t { dct = 0, dft = 1, db2 = 2, db8 = 3 };

std::string_view to_string(BasisKind kind) noexcept;
BasisKind parse_basis_kind(std::string_view name);

/// An orthonormal N x N basis. Wavelet kinds require a power-of-two length.
class BasisSpec {
public:
    BasisSpec(BasisKind kind, std::size_t n);

    BasisKind kind() const noexcept { return kind_; }
    std::size_t n() const noexcept { return n_; }
    bool is_complex() const noexcept { return kind_ == BasisKind::dft; }

    friend bool operator==(const BasisSpec&, const BasisSpec&) = default;

private:
    BasisKind kind_;
    std::size_t n_;
};

/// Coefficients of a block in a basis. Stored complex for every kind; the
/// imaginary parts are zero for the real bases.
struct CoefficientVector {
    BasisSpec basis;
    std::vector<Complex> values;
};

/// s = Psi^H x. DCT is the orthonormal DCT-II, DFT is unitary (1/sqrt(n)),
/// wavelets are periodic full-depth decompositions laid out coarse to fine:
/// [a_J, d_J, d_{J-1} (2), ..., d_1 (n/2)].
CoefficientVector analyze(std::span<const double> x, const BasisSpec& basis);

/// x = Psi s. DFT coefficients must be conjugate-symmetric (to 1e-8 relative
/// to their largest magnitude); they are projected onto the Hermitian
/// subspace before inversion so the output is real up to rounding.
std::vector<double> synthesize(const CoefficientVector& s);

/// k-th column of Psi (the synthesis atom). Complex for DFT.
std::vector<Complex> basis_column(const BasisSpec& basis, std::size_t k);

/// Daubechies minimum-phase lowpass (scaling) filters, DbK with 2K taps.
std::span<const double> daubechies_lowpass(BasisKind kind);

} // namespace vibcs
