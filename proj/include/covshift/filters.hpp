#pragma once

#include "covshift/operators.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace covshift {

enum class FilterFamily { krr, gradient_flow, spectral_cutoff };

FilterFamily parse_filter_family(const std::string& name);
std::string filter_family_name(FilterFamily family);

/// A spectral filter g_lam together with its declared qualification tau and
/// constants E, F:
///
///     sup_t t^c g(t)          <= E lam^(c-1)   for c in [0, 1]
///     sup_t t^c |1 - t g(t)|  <= F lam^c       for c in [0, tau]
struct FilterSpec {
    FilterFamily family = FilterFamily::krr;
    double lam = 1.0;
    double tau = 1.0;
    double E = 1.0;
    double F = 1.0;

    /// (t + lam)^-1; tau = 1, E = F = 1.
    static FilterSpec krr(double lam);
    /// t^-1 (1 - exp(-t / lam)); any tau >= 1, E = 1, F = max(1, (tau / e)^tau).
    static FilterSpec gradient_flow(double lam, double tau = 2.0);
    /// t^-1 1{t >= lam}; any tau >= 1, E = F = 1.
    static FilterSpec spectral_cutoff(double lam, double tau = 2.0);
    /// The family's default constants for a given tau.
    static FilterSpec standard(FilterFamily family, double lam, double tau);

    FilterSpec with_lambda(double new_lam) const;
};

/// The residual constant F for gradient flow at qualification tau.
///
/// sup_t t^c exp(-t / lam) = (c lam / e)^c, and (c / e)^c over [0, tau] peaks
/// at c = 0 (value 1) or c = tau, hence the max with 1.
double gradient_flow_residual_constant(double tau);

double filter_value(const FilterSpec& spec, double t);

/// g(L) applied to the expansion with coefficients b. KRR goes through a
/// shifted linear solve; the other families through the eigendecomposition.
Eigen::VectorXd apply_filter(const OperatorRep& rep, const FilterSpec& spec, const Eigen::VectorXd& b);

struct FilterCheckReport {
    bool passes = true;
    /// min over all checked (condition, lambda, c) of 1 - lhs / rhs.
    /// Negative beyond the slack means a violation.
    double worst_margin = 1.0;
    int witness_condition = 0;  // 1 or 2
    double witness_lambda = 0.0;
    double witness_c = 0.0;
    double witness_t = 0.0;
};

struct FilterCheckGrids {
    std::vector<double> c_cond1;  // subset of [0, 1]
    std::vector<double> c_cond2;  // subset of [0, tau]
    std::vector<double> t;        // subset of [0, kappa^2]
    std::vector<double> lambdas;

    /// n_c evenly spaced c values on each range, n_t log-spaced t values on
    /// [t_min, kappa_sq], and lam in {1e-3, 1e-2, 1e-1, 1}.
    static FilterCheckGrids standard(double tau, double kappa_sq = 1.0, int n_c = 50, int n_t = 200,
                                     double t_min = 1e-8);
};

/// Checks the declared (E, F, tau) of `spec` against both filter conditions
/// on the grids, with multiplicative slack 1 + 1e-9. spec.lam is ignored;
/// the sweep uses grids.lambdas.
FilterCheckReport check_filter_conditions(const FilterSpec& spec, const FilterCheckGrids& grids);

}  // namespace covshift
