#include "vibcs/metrics.hpp"

#include "vibcs/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vibcs {

double sparsity_fraction(std::span<const Complex> coefficients, double threshold_rel) {
    if (coefficients.empty())
        throw Error(ErrorKind::parameter, "sparsity of an empty coefficient vector");
    if (!(threshold_rel > 0.0 && threshold_rel < 1.0))
        throw Error(ErrorKind::parameter, "sparsity threshold must lie in (0, 1)");
    double peak = 0.0;
    for (const auto& c : coefficients)
        peak = std::max(peak, std::abs(c));
    if (peak == 0.0)
        return 0.0;
    const double cut = threshold_rel * peak;
    const auto small = std::count_if(coefficients.begin(), coefficients.end(),
                                     [cut](const Complex& c) { return std::abs(c) < cut; });
    return static_cast<double>(small) / static_cast<double>(coefficients.size());
}

double sparsity_fraction(const CoefficientVector& s, double threshold_rel) {
    return sparsity_fraction(std::span<const Complex>(s.values), threshold_rel);
}

MetricReport sparsity_report(const CoefficientVector& s, double threshold_rel) {
    MetricReport report{"sparsity_fraction", sparsity_fraction(s, threshold_rel), {}};
    report.context["basis"] = std::string(to_string(s.basis.kind()));
    report.context["n"] = std::to_string(s.basis.n());
    report.context["threshold_rel"] = std::to_string(threshold_rel);
    const bool all_zero = std::all_of(s.values.begin(), s.values.end(),
                                      [](const Complex& c) { return c == Complex{}; });
    if (all_zero)
        report.context["all_zero"] = "true";
    return report;
}

double coherence(const MatrixSpec& spec, const BasisSpec& basis, std::size_t max_entries) {
    if (spec.n() != basis.n())
        throw Error(ErrorKind::dimension, "matrix width and basis length differ");
    const Eigen::MatrixXd phi = materialize(spec, max_entries);
    double peak = 0.0;
    std::vector<double> row(spec.n());
    for (Eigen::Index j = 0; j < phi.rows(); ++j) {
        const double norm = phi.row(j).norm();
        if (norm == 0.0)
            throw Error(ErrorKind::parameter, "zero row in measurement matrix");
        for (Eigen::Index t = 0; t < phi.cols(); ++t)
            row[static_cast<std::size_t>(t)] = phi(j, t) / norm;
        // |analyze(row)_k| = |<psi_k, row>|.
        for (const auto& c : analyze(row, basis).values)
            peak = std::max(peak, std::abs(c));
    }
    return std::sqrt(static_cast<double>(spec.n())) * peak;
}

double coherence(const Eigen::MatrixXd& phi, const Eigen::MatrixXcd& psi) {
    if (phi.cols() != psi.rows())
        throw Error(ErrorKind::dimension, "matrix width and basis length differ");
    double peak = 0.0;
    for (Eigen::Index j = 0; j < phi.rows(); ++j) {
        const double norm = phi.row(j).norm();
        if (norm == 0.0)
            throw Error(ErrorKind::parameter, "zero row in measurement matrix");
        const Eigen::RowVectorXcd products = (phi.row(j) / norm).cast<Complex>() * psi;
        peak = std::max(peak, products.cwiseAbs().maxCoeff());
    }
    return std::sqrt(static_cast<double>(phi.cols())) * peak;
}

double compression_ratio(std::size_t m, std::size_t n) {
    if (m == 0 || m > n)
        throw Error(ErrorKind::parameter, "compression ratio needs 1 <= m <= n");
    return 100.0 * static_cast<double>(m) / static_cast<double>(n);
}

double snr_db(std::span<const double> x, std::span<const double> x_hat) {
    if (x.size() != x_hat.size())
        throw Error(ErrorKind::dimension, "original and reconstruction lengths differ");
    double signal = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        signal += x[i] * x[i];
        const double e = x[i] - x_hat[i];
        error += e * e;
    }
    if (signal == 0.0)
        throw Error(ErrorKind::undefined_metric, "SNR is undefined for an all-zero signal");
    if (error == 0.0)
        return kSnrPerfect;
    return 10.0 * std::log10(signal / error);
}

double rms(std::span<const double> x) {
    if (x.empty())
        throw Error(ErrorKind::parameter, "RMS of an empty signal");
    double acc = 0.0;
    for (double v : x)
        acc += v * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

double kurtosis(std::span<const double> x) {
    if (x.size() < 4)
        throw Error(ErrorKind::parameter, "kurtosis needs at least 4 samples");
    const double count = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x)
        mean += v;
    mean /= count;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : x) {
        const double d2 = (v - mean) * (v - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= count;
    m4 /= count;
    if (m2 == 0.0)
        throw Error(ErrorKind::undefined_metric, "kurtosis is undefined for a constant signal");
    return m4 / (m2 * m2);
}

} // namespace vibcs
