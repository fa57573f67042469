#include "vibcs/recover.hpp"

#include "vibcs/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vibcs {

namespace {

// Columns with a smaller norm carry no information about the block (e.g. a
// wavelet atom whose support misses every Wang sample).
constexpr double kMinAtomNorm = 1e-13;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Thin QR of the support columns, grown one column at a time with classical
// Gram-Schmidt plus one reorthogonalization pass.
template <typename Scalar>
class IncrementalQr {
public:
    IncrementalQr(Eigen::Index rows, Eigen::Index capacity, const Vec<Scalar>& y)
        : q_(rows, capacity), r_(Mat<Scalar>::Zero(capacity, capacity)), qty_(capacity), y_(y) {}

    Eigen::Index size() const noexcept { return cols_; }

    // Returns false (leaving the factorization untouched) when `a` is
    // numerically inside the current span.
    bool append(const Vec<Scalar>& a) {
        const double a_norm = a.norm();
        Vec<Scalar> v = a;
        Vec<Scalar> coeffs = Vec<Scalar>::Zero(cols_);
        for (int pass = 0; pass < 2 && cols_ > 0; ++pass) {
            const Vec<Scalar> proj = q_.leftCols(cols_).adjoint() * v;
            v -= q_.leftCols(cols_) * proj;
            coeffs += proj;
        }
        const double rho = v.norm();
        if (!(rho > a_norm / kMaxConditionEstimate))
            return false;
        q_.col(cols_) = v / rho;
        r_.col(cols_).head(cols_) = coeffs;
        r_(cols_, cols_) = rho;
        qty_(cols_) = q_.col(cols_).dot(y_);
        ++cols_;
        return true;
    }

    void truncate(Eigen::Index cols) { cols_ = cols; }

    Vec<Scalar> residual() const { return y_ - q_.leftCols(cols_) * qty_.head(cols_); }

    Vec<Scalar> coefficients() const {
        return r_.topLeftCorner(cols_, cols_)
            .template triangularView<Eigen::Upper>()
            .solve(qty_.head(cols_));
    }

private:
    Mat<Scalar> q_;
    Mat<Scalar> r_;
    Vec<Scalar> qty_;
    Vec<Scalar> y_;
    Eigen::Index cols_ = 0;
};

template <typename Scalar>
RecoveryResult run_omp(const Mat<Scalar>& a, const Eigen::VectorXd& norms,
                       std::span<const double> y_in, const BasisSpec& basis,
                       const OmpConfig& cfg) {
    const auto m = a.rows();
    const auto n = a.cols();
    const bool pair_conjugates = basis.kind() == BasisKind::dft;

    Vec<Scalar> y(m);
    for (Eigen::Index i = 0; i < m; ++i)
        y(i) = y_in[static_cast<std::size_t>(i)];

    RecoveryResult result{
        .x_hat = std::vector<double>(static_cast<std::size_t>(n), 0.0),
        .s_hat = CoefficientVector{basis, std::vector<Complex>(static_cast<std::size_t>(n))},
        .support = {},
        .residual_norm = 0.0,
        .iterations = 0,
        .residual_history = {},
        .degenerate = false,
        .rejected_atoms = {},
    };
    const double y_norm = y.norm();
    result.residual_history.push_back(y_norm);
    if (y_norm == 0.0)
        return result;

    std::size_t budget = cfg.max_atoms.value_or(std::max<std::size_t>(1, m / 2));
    budget = std::min({budget, static_cast<std::size_t>(m), static_cast<std::size_t>(n)});

    IncrementalQr<Scalar> qr(m, static_cast<Eigen::Index>(budget), y);
    std::vector<char> blocked(static_cast<std::size_t>(n), 0);
    for (Eigen::Index k = 0; k < n; ++k)
        if (norms(k) <= kMinAtomNorm)
            blocked[static_cast<std::size_t>(k)] = 1;

    Vec<Scalar> residual = y;
    double previous = y_norm;
    while (result.support.size() < budget) {
        const Vec<Scalar> corr = a.adjoint() * residual;
        Eigen::Index best = -1;
        double best_score = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            if (blocked[static_cast<std::size_t>(k)])
                continue;
            const double score = std::abs(corr(k)) / norms(k);
            if (score > best_score) {
                best_score = score;
                best = k;
            }
        }
        if (best < 0)
            break;

        std::vector<Eigen::Index> candidates{best};
        if (pair_conjugates && best != 0 && 2 * best != n)
            candidates.push_back(n - best);
        if (result.support.size() + candidates.size() > budget)
            break;

        const Eigen::Index before = qr.size();
        bool independent = true;
        for (auto k : candidates)
            if (!qr.append(a.col(k))) {
                independent = false;
                break;
            }
        for (auto k : candidates)
            blocked[static_cast<std::size_t>(k)] = 1;
        if (!independent) {
            qr.truncate(before);
            result.degenerate = true;
            for (auto k : candidates)
                result.rejected_atoms.push_back(static_cast<std::size_t>(k));
            continue;
        }
        for (auto k : candidates)
            result.support.push_back(static_cast<std::size_t>(k));

        residual = qr.residual();
        const double current = residual.norm();
        result.residual_history.push_back(current);
        if (current <= cfg.residual_tol_rel * y_norm)
            break;
        if (previous - current < cfg.min_improvement_rel * previous)
            break;
        previous = current;
    }

    result.iterations = result.support.size();
    if (result.support.empty()) {
        result.residual_norm = y_norm;
        return result;
    }

    const Vec<Scalar> c = qr.coefficients();
    auto& s = result.s_hat.values;
    for (std::size_t i = 0; i < result.support.size(); ++i)
        s[result.support[i]] = Complex(c(static_cast<Eigen::Index>(i)));
    if (pair_conjugates) {
        // The joint fit of a conjugate pair is Hermitian up to rounding; make it exact.
        const std::size_t len = s.size();
        std::vector<Complex> sym(len);
        for (std::size_t k = 0; k < len; ++k)
            sym[k] = 0.5 * (s[k] + std::conj(s[(len - k) % len]));
        s.swap(sym);
    }

    Vec<Scalar> fit = Vec<Scalar>::Zero(m);
    for (auto k : result.support) {
        if constexpr (std::is_same_v<Scalar, double>)
            fit += a.col(static_cast<Eigen::Index>(k)) * s[k].real();
        else
            fit += a.col(static_cast<Eigen::Index>(k)) * s[k];
    }
    result.residual_norm = (y - fit).norm();
    result.x_hat = synthesize(result.s_hat);
    return result;
}

template <typename Scalar>
Vec<Scalar> solve_least_squares(const Mat<Scalar>& columns, const Vec<Scalar>& y) {
    if (columns.rows() != y.size())
        throw Error(ErrorKind::dimension, "column height and measurement length differ");
    if (columns.cols() > columns.rows())
        throw Error(ErrorKind::dimension, "more support columns than measurements");
    if (columns.cols() == 0)
        return Vec<Scalar>(0);
    Eigen::ColPivHouseholderQR<Mat<Scalar>> qr(columns);
    const auto& r = qr.matrixR();
    const double largest = std::abs(r(0, 0));
    const double smallest = std::abs(r(columns.cols() - 1, columns.cols() - 1));
    if (!(smallest * kMaxConditionEstimate > largest))
        throw Error(ErrorKind::rank_deficient,
                    "support columns are numerically rank deficient (condition estimate " +
                        std::to_string(smallest > 0.0 ? largest / smallest : INFINITY) + ")");
    return qr.solve(y);
}

} // namespace

SensingDictionary::SensingDictionary(const MatrixSpec& spec, const BasisSpec& basis)
    : spec_(spec), basis_(basis) {
    Eigen::MatrixXcd a = sensing_matrix(spec, basis);
    norms_ = a.colwise().norm().transpose();
    if (basis.is_complex())
        data_ = std::move(a);
    else
        data_ = Eigen::MatrixXd(a.real());
}

RecoveryResult omp_solve(std::span<const double> y, const SensingDictionary& dict,
                         const OmpConfig& cfg) {
    if (y.size() != dict.matrix().m())
        throw Error(ErrorKind::dimension, "measurement count " + std::to_string(y.size()) +
                                              " does not match m=" +
                                              std::to_string(dict.matrix().m()));
    return std::visit(
        [&](const auto& a) { return run_omp(a, dict.column_norms(), y, dict.basis(), cfg); },
        dict.matrix_data());
}

RecoveryResult omp_solve(const MeasurementVector& y, const BasisSpec& basis,
                         const MatrixSpec& spec, const OmpConfig& cfg) {
    if (!(y.spec == spec))
        throw Error(ErrorKind::parameter, "measurements were taken with a different matrix");
    if (spec.n() != basis.n())
        throw Error(ErrorKind::dimension, "matrix width and basis length differ");
    return omp_solve(y.values, SensingDictionary(spec, basis), cfg);
}

RecoveryResult reconstruct_block(std::span<const double> y, const SensingDictionary& dict,
                                 const OmpConfig& cfg) {
    const auto& spec = dict.matrix();
    if (spec.kind() != MatrixKind::wang || spec.m() != spec.n())
        return omp_solve(y, dict, cfg);
    if (y.size() != spec.m())
        throw Error(ErrorKind::dimension, "measurement count does not match m");

    RecoveryResult result{.x_hat = std::vector<double>(spec.n(), 0.0),
                          .s_hat = CoefficientVector{dict.basis(), {}}};
    for (std::size_t i = 0; i < spec.m(); ++i)
        result.x_hat[spec.wang_indices()[i]] = y[i];
    result.s_hat = analyze(result.x_hat, dict.basis());
    result.support.resize(spec.n());
    for (std::size_t k = 0; k < spec.n(); ++k)
        result.support[k] = k;
    result.iterations = spec.n();
    double y_norm = 0.0;
    for (double v : y)
        y_norm += v * v;
    result.residual_history = {std::sqrt(y_norm), 0.0};
    return result;
}

Eigen::VectorXd least_squares_on_support(const Eigen::MatrixXd& columns,
                                         const Eigen::VectorXd& y) {
    return solve_least_squares<double>(columns, y);
}

Eigen::VectorXcd least_squares_on_support(const Eigen::MatrixXcd& columns,
                                          const Eigen::VectorXcd& y) {
    return solve_least_squares<Complex>(columns, y);
}

} // namespace vibcs
