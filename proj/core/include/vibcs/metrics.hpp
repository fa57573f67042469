#pragma once

#include "vibcs/measure.hpp"
#include "vibcs/transforms.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>

namespace vibcs {

struct MetricReport {
    std::string name;
    double value = 0.0;
    std::map<std::string, std::string> context;
};

/// Fraction of coefficients with |c| < threshold_rel * max|c|. An all-zero
/// vector yields 0 (the report variant flags it in its context).
double sparsity_fraction(std::span<const Complex> coefficients, double threshold_rel = 0.01);
double sparsity_fraction(const CoefficientVector& s, double threshold_rel = 0.01);
MetricReport sparsity_report(const CoefficientVector& s, double threshold_rel = 0.01);

/// sqrt(n) * max_{j,k} |<phi_j / ||phi_j||, psi_k>| for unit-norm basis columns.
double coherence(const MatrixSpec& spec, const BasisSpec& basis,
                 std::size_t max_entries = kDefaultMaterializeCap);

/// Same definition for explicit matrices: rows of `phi` against the columns
/// of `psi` (assumed unit norm).
double coherence(const Eigen::MatrixXd& phi, const Eigen::MatrixXcd& psi);

/// 100 * m / n.
double compression_ratio(std::size_t m, std::size_t n);

inline constexpr double kSnrPerfect = std::numeric_limits<double>::infinity();

/// 10 log10(sum x^2 / sum (x - x_hat)^2); kSnrPerfect when the error is zero.
double snr_db(std::span<const double> x, std::span<const double> x_hat);

double rms(std::span<const double> x);

/// Non-excess kurtosis m4 / m2^2 with biased central moments.
double kurtosis(std::span<const double> x);

} // namespace vibcs
