#pragma once

#include "covshift/filters.hpp"
#include "covshift/kernels.hpp"
#include "covshift/operators.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace covshift {

/// Kernel estimate of the relative ratio phi = d(target) / d(mixture), with
/// mixture = (1 - alpha) source + alpha target. The expansion runs over the
/// 2 n_theta combined points, source points first.
struct RelativeRatioEstimate {
    KernelExpansion expansion;
    double alpha = 0.5;
    double mu = 1.0;
    std::size_t n_theta = 0;

    Eigen::VectorXd operator()(const PointSet& queries) const { return expansion(queries); }
};

/// phi_hat = g_mu(L_R) L_T 1 from equal-size source and target samples.
/// `filter.lam` is the regularization parameter mu.
RelativeRatioEstimate estimate_relative_ratio(const PointSet& source, const PointSet& target, double alpha,
                                              const KernelSpec& kernel, const FilterSpec& filter);

/// Upper end of the truncation interval, D / (alpha D + 1 - alpha).
double relative_cap(double alpha, double D);

/// min(max(value, 0), relative_cap(alpha, D)).
double truncate_relative(double value, double alpha, double D);

/// theta = (1 - alpha) phi / (1 - alpha phi). Throws std::domain_error when
/// alpha * phi >= 1.
double to_standard_ratio(double phi, double alpha);

/// phi = theta / (alpha theta + 1 - alpha); tends to 1 / alpha as theta grows.
double relative_of_standard(double theta, double alpha);

/// mu = n_theta^(-1 / (2 iota + 1)).
double schedule_mu(std::size_t n_theta, double iota);

/// D = n_theta^nu with nu = (1 / m) * 2 iota / (2 iota + 1). Requires m > 2.
double schedule_truncation(std::size_t n_theta, double iota, double m);

/// Exponent nu used by schedule_truncation.
double truncation_exponent(double iota, double m);

/// The composite estimator: relative estimate, then truncation to
/// [0, relative_cap], then the inverse transform. Values of theta() lie in
/// [0, D].
class DensityRatioEstimate {
public:
    DensityRatioEstimate(RelativeRatioEstimate base, double D);

    const RelativeRatioEstimate& base() const { return base_; }
    double alpha() const { return base_.alpha; }
    double mu() const { return base_.mu; }
    double truncation() const { return D_; }

    Eigen::VectorXd relative_raw(const PointSet& queries) const { return base_(queries); }
    Eigen::VectorXd relative(const PointSet& queries) const;
    Eigen::VectorXd theta(const PointSet& queries) const;

    Eigen::VectorXd operator()(const PointSet& queries) const { return theta(queries); }

private:
    RelativeRatioEstimate base_;
    double D_;
};

/// Runs the three steps with mu and D taken from the schedules.
DensityRatioEstimate estimate_density_ratio(const PointSet& source, const PointSet& target, double alpha,
                                            const KernelSpec& kernel, FilterFamily family, double tau,
                                            double iota, double m);

}  // namespace covshift
