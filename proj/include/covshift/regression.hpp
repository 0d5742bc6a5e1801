#pragma once

#include "covshift/filters.hpp"
#include "covshift/kernels.hpp"
#include "covshift/operators.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace covshift {

struct LabeledSample {
    PointSet xs;
    Eigen::VectorXd ys;

    std::size_t size() const { return static_cast<std::size_t>(xs.rows()); }
};

/// Vectorized importance-weight function x -> theta_hat(x) >= 0.
using WeightFunction = std::function<Eigen::VectorXd(const PointSet&)>;

/// Weight function returning 1 everywhere (ordinary, unweighted regression).
WeightFunction unit_weights();

/// Importance-weighted spectral estimator over the labeled inputs.
struct Regressor {
    KernelExpansion expansion;
    double lam = 1.0;
    FilterSpec filter;
    /// theta_hat(x_i) at each labeled input.
    Eigen::VectorXd weights_used;
    /// Largest eigenvalue of the weighted operator when its trace bound
    /// exceeds kappa^2, otherwise empty (the spectrum is then within [0, kappa^2]).
    std::optional<double> lambda_max_above_kappa;

    Eigen::VectorXd predict(const PointSet& queries) const { return expansion(queries); }
    Eigen::VectorXd operator()(const PointSet& queries) const { return predict(queries); }
};

/// f_hat = g_lam(L_W) S_W* y with L_W weighted by theta_hat(x_i) / n_f.
/// Points with zero weight receive coefficient exactly 0.
Regressor fit_iw_spectral(const LabeledSample& data, const WeightFunction& weight_fn, const KernelSpec& kernel,
                          const FilterSpec& filter);

/// lam = n_f^(-s).
double schedule_lambda(std::size_t n_f, double s);

/// Exponent s of lam = n_f^-s for the polynomial coupling n_theta = n_f^beta.
///
/// beta >= 1 + 1/(2 iota): s = 1/(2r+1) - eps. Otherwise, with
/// T = (1 + 1/(2 iota)) / beta - 1:
///   r <  1/2 + T          -> beta iota/(2 iota+1) - eps
///   r <= 1/2 + 1/T        -> 1/(2r+1) - eps
///   r >  1/2 + 1/T        -> beta iota/(2 iota+1) min(1, 2/(2r-1)) - eps
double select_exponent_s(double beta, double iota, double r, double epsilon);

struct SampleSizeInputs {
    std::size_t n_theta = 0;
    std::size_t n_f = 0;
    double s = 0.25;
    double iota = 0.5;
    double m = 10.0;
    double r = 0.5;
    double alpha = 0.5;
    double kappa_sq = 1.0;
    double delta = 0.1;
    /// Operator norms of the population source / target integral operators,
    /// usually approximated by the top eigenvalue of empirical operators.
    double norm_source = 1.0;
    double norm_target = 1.0;
    /// Stand-ins for the unobservable constants of the sufficiency conditions.
    double delta_phi = 1.0;
    double xi_m = 1.0;
};

struct InequalityCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool passes = false;
    double slack = 0.0;  // lhs - rhs
};

/// Evaluates the sample-size sufficiency conditions. Purely informational.
/// Order: the two coupled conditions on (n_theta, n_f), then the condition
/// on n_theta alone.
std::vector<InequalityCheck> sample_size_diagnostic(const SampleSizeInputs& in);

}  // namespace covshift
