#include "covshift/dre.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace covshift {

namespace {
void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("mixing coefficient alpha must lie in (0, 1)");
}
}  // namespace

RelativeRatioEstimate estimate_relative_ratio(const PointSet& source, const PointSet& target, double alpha,
                                              const KernelSpec& kernel, const FilterSpec& filter) {
    require_alpha(alpha);
    if (!(filter.lam > 0.0)) throw std::invalid_argument("relative ratio: mu must be positive");
    const Eigen::Index n = source.rows();
    if (n == 0) throw std::invalid_argument("relative ratio: empty sample");
    if (target.rows() != n) {
        throw std::invalid_argument("relative ratio: source and target sizes differ (" + std::to_string(n) +
                                    " vs " + std::to_string(target.rows()) + ")");
    }
    if (source.cols() != target.cols()) throw std::invalid_argument("relative ratio: dimension mismatch");

    PointSet combined(2 * n, source.cols());
    combined.topRows(n) = source;
    combined.bottomRows(n) = target;

    const double nd = static_cast<double>(n);
    Eigen::VectorXd weights(2 * n);
    weights.head(n).setConstant((1.0 - alpha) / nd);
    weights.tail(n).setConstant(alpha / nd);

    // L_T 1 as an expansion: 1/n on every target point.
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * n);
    rhs.tail(n).setConstant(1.0 / nd);

    const OperatorRep rep(combined, std::move(weights), kernel);
    Eigen::VectorXd coeffs = apply_filter(rep, filter, rhs);
    if (!coeffs.allFinite()) throw std::runtime_error("relative ratio: non-finite coefficients");

    RelativeRatioEstimate out;
    out.expansion = KernelExpansion{std::move(combined), std::move(coeffs), kernel};
    out.alpha = alpha;
    out.mu = filter.lam;
    out.n_theta = static_cast<std::size_t>(n);
    return out;
}

double relative_cap(double alpha, double D) {
    return D / (alpha * D + (1.0 - alpha));
}

double truncate_relative(double value, double alpha, double D) {
    if (!(D > 0.0)) throw std::invalid_argument("truncation threshold D must be positive");
    return std::min(std::max(value, 0.0), relative_cap(alpha, D));
}

double to_standard_ratio(double phi, double alpha) {
    if (alpha * phi >= 1.0) throw std::domain_error("to_standard_ratio: alpha * phi >= 1");
    return (1.0 - alpha) * phi / (1.0 - alpha * phi);
}

double relative_of_standard(double theta, double alpha) {
    if (std::isinf(theta)) return 1.0 / alpha;
    return theta / (alpha * theta + (1.0 - alpha));
}

double schedule_mu(std::size_t n_theta, double iota) {
    if (n_theta == 0) throw std::invalid_argument("schedule_mu: n_theta must be positive");
    if (!(iota >= 0.5)) throw std::invalid_argument("schedule_mu: iota must be >= 1/2");
    return std::pow(static_cast<double>(n_theta), -1.0 / (2.0 * iota + 1.0));
}

double truncation_exponent(double iota, double m) {
    if (!(m > 2.0)) throw std::invalid_argument("truncation schedule: moment order m must exceed 2");
    if (!(iota >= 0.5)) throw std::invalid_argument("truncation schedule: iota must be >= 1/2");
    return (1.0 / m) * (2.0 * iota / (2.0 * iota + 1.0));
}

double schedule_truncation(std::size_t n_theta, double iota, double m) {
    const double nu = truncation_exponent(iota, m);
    if (n_theta == 0) throw std::invalid_argument("schedule_truncation: n_theta must be positive");
    return std::pow(static_cast<double>(n_theta), nu);
}

DensityRatioEstimate::DensityRatioEstimate(RelativeRatioEstimate base, double D) : base_(std::move(base)), D_(D) {
    if (!(D_ > 0.0)) throw std::invalid_argument("truncation threshold D must be positive");
}

Eigen::VectorXd DensityRatioEstimate::relative(const PointSet& queries) const {
    Eigen::VectorXd v = base_(queries);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = truncate_relative(v[i], alpha(), D_);
    return v;
}

Eigen::VectorXd DensityRatioEstimate::theta(const PointSet& queries) const {
    Eigen::VectorXd v = relative(queries);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        // The cap maps to D; min() guards the last ulp of the round trip.
        v[i] = std::min(to_standard_ratio(v[i], alpha()), D_);
    }
    return v;
}

DensityRatioEstimate estimate_density_ratio(const PointSet& source, const PointSet& target, double alpha,
                                            const KernelSpec& kernel, FilterFamily family, double tau,
                                            double iota, double m) {
    const auto n = static_cast<std::size_t>(source.rows());
    const double mu = schedule_mu(n, iota);
    const double D = schedule_truncation(n, iota, m);
    const FilterSpec filter = FilterSpec::standard(family, mu, tau);
    return DensityRatioEstimate(estimate_relative_ratio(source, target, alpha, kernel, filter), D);
}

}  // namespace covshift
