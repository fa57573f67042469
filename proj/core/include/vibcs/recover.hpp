#pragma once

#include "vibcs/measure.hpp"
#include "vibcs/transforms.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

namespace vibcs {

struct OmpConfig {
    /// Support-size budget; unset means floor(m / 2), resolved at solve time.
    std::optional<std::size_t> max_atoms;
    /// Stop once ||r|| <= residual_tol_rel * ||y||.
    double residual_tol_rel = 1e-6;
    /// Stop once (||r_prev|| - ||r||) / ||r_prev|| drops below this.
    double min_improvement_rel = 1e-8;
};

struct RecoveryResult {
    std::vector<double> x_hat;
    CoefficientVector s_hat;
    /// Atoms in selection order. A DFT conjugate pair enters together.
    std::vector<std::size_t> support{};
    double residual_norm = 0.0;
    /// Atoms added (equals support.size()).
    std::size_t iterations = 0;
    /// Residual norm after each selection step, starting with ||y||.
    std::vector<double> residual_history{};
    /// Set when a candidate atom was rejected as linearly dependent on the
    /// current support.
    bool degenerate = false;
    std::vector<std::size_t> rejected_atoms{};
};

/// Phi Psi materialized once for a (matrix, basis) pair, together with the
/// column norms used to normalize correlations. Reusable across blocks.
class SensingDictionary {
public:
    SensingDictionary(const MatrixSpec& spec, const BasisSpec& basis);

    const MatrixSpec& matrix() const noexcept { return spec_; }
    const BasisSpec& basis() const noexcept { return basis_; }
    const Eigen::VectorXd& column_norms() const noexcept { return norms_; }

    /// Real for DCT/Db2/Db8, complex for DFT.
    const std::variant<Eigen::MatrixXd, Eigen::MatrixXcd>& matrix_data() const noexcept {
        return data_;
    }

private:
    MatrixSpec spec_;
    BasisSpec basis_;
    std::variant<Eigen::MatrixXd, Eigen::MatrixXcd> data_;
    Eigen::VectorXd norms_;
};

/// Orthogonal Matching Pursuit for y = Phi Psi s.
///
/// Each step picks the unselected atom with the largest normalized
/// correlation |<A_k, r>| / ||A_k|| (lowest index on ties; zero-norm atoms
/// are never eligible), refits y by least squares on the unnormalized
/// support columns, and updates the residual. With the DFT basis an atom
/// k != 0, n/2 brings its conjugate partner n - k into the support in the
/// same step so the synthesized block stays real. A candidate that is
/// numerically dependent on the support is rejected (flagged `degenerate`)
/// and excluded from later steps.
RecoveryResult omp_solve(const MeasurementVector& y, const BasisSpec& basis,
                         const MatrixSpec& spec, const OmpConfig& cfg = {});

RecoveryResult omp_solve(std::span<const double> y, const SensingDictionary& dict,
                         const OmpConfig& cfg = {});

/// Block reconstruction used by the pipeline: a full-rate Wang matrix is a
/// permutation of the block and is inverted exactly (the constraint set of
/// the l1 problem is a single point); every other case runs omp_solve.
/// The full-rate path reports every atom in the support and a zero residual.
RecoveryResult reconstruct_block(std::span<const double> y, const SensingDictionary& dict,
                                 const OmpConfig& cfg = {});

/// Columns whose condition estimate exceeds this are reported as rank deficient.
inline constexpr double kMaxConditionEstimate = 1e12;

/// Minimizer of ||y - A c||_2 via column-pivoted Householder QR. Throws
/// ErrorKind::rank_deficient if the condition estimate of A exceeds
/// kMaxConditionEstimate, ErrorKind::dimension if A has more columns than rows
/// or y does not match A's row count.
Eigen::VectorXd least_squares_on_support(const Eigen::MatrixXd& columns,
                                         const Eigen::VectorXd& y);
Eigen::VectorXcd least_squares_on_support(const Eigen::MatrixXcd& columns,
                                          const Eigen::VectorXcd& y);

} // namespace vibcs
