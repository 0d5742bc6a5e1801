#pragma once

#include "covshift/kernels.hpp"
#include "covshift/operators.hpp"
#include "covshift/regression.hpp"
#include "covshift/scenarios.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace covshift {

using Evaluator = std::function<Eigen::VectorXd(const PointSet&)>;
using Sampler = std::function<PointSet(std::size_t, std::uint64_t)>;

/// Monte-Carlo estimate of the L2(rho) distance between two functions,
/// sqrt(mean (f_est - f_true)^2) over n_mc fresh draws from `sampler`.
double mc_l2_error(const Evaluator& f_est, const Evaluator& f_true, const Sampler& sampler, std::size_t n_mc,
                   std::uint64_t seed);

/// E_target (f_hat - f_rho)^2, i.e. target risk minus the noise floor.
double excess_target_risk(const Regressor& reg, const Scenario& scenario, std::size_t n_mc, std::uint64_t seed);

/// RKHS norm sqrt(c^T G c) of an expansion over the operator's points.
double h_norm_proxy(const Eigen::VectorXd& coeffs, const OperatorRep& rep);

/// ||a - b||_H when both expansions live on the same points; empty otherwise.
std::optional<double> h_norm_difference(const KernelExpansion& a, const KernelExpansion& b);

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};

/// Least squares of ln(err) on ln(n).
LogLogFit fit_loglog_slope(std::span<const double> ns, std::span<const double> errs);

struct Summary {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr() const { return q3 - q1; }
};

/// Median and quartiles (linear interpolation between order statistics).
Summary summarize(std::vector<double> values);

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// One replication of an experiment. Metrics that a given experiment does
/// not measure stay NaN and are written as empty CSV fields.
struct ReplicationRecord {
    std::string scenario;
    std::size_t n_theta = 0;
    std::size_t n_f = 0;
    double alpha = 0.5;
    double iota = 0.5;
    double m = 10.0;
    std::string filter;
    std::uint64_t seed = 0;
    double err_phi_rhoR = kMissing;
    double err_theta_rhoS = kMissing;
    double err_f_rhoT = kMissing;
    double err_f_H_proxy = kMissing;
    double excess_risk = kMissing;
};

struct MetricsReport {
    std::vector<ReplicationRecord> records;

    /// Median / IQR of one metric grouped by a sample-size key, in
    /// increasing key order. Records with a missing value are skipped.
    std::vector<std::pair<std::size_t, Summary>> aggregate(double ReplicationRecord::*metric,
                                                           std::size_t ReplicationRecord::*key) const;
};

/// Header of the replication CSV.
inline constexpr const char* kRecordHeader =
    "scenario,n_theta,n_f,alpha,iota,m,filter,seed,err_phi_rhoR,err_theta_rhoS,err_f_rhoT,excess_risk";

}  // namespace covshift
