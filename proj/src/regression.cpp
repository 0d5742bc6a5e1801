#include "covshift/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace covshift {

WeightFunction unit_weights() {
    return [](const PointSet& xs) { return Eigen::VectorXd::Ones(xs.rows()).eval(); };
}

Regressor fit_iw_spectral(const LabeledSample& data, const WeightFunction& weight_fn, const KernelSpec& kernel,
                          const FilterSpec& filter) {
    const Eigen::Index n = data.xs.rows();
    if (n == 0) throw std::invalid_argument("fit: empty labeled sample");
    if (data.ys.size() != n) throw std::invalid_argument("fit: inputs and labels differ in length");
    if (!data.ys.allFinite()) throw std::invalid_argument("fit: non-finite label");
    if (!(filter.lam > 0.0)) throw std::invalid_argument("fit: lambda must be positive");

    Eigen::VectorXd theta = weight_fn(data.xs);
    if (theta.size() != n) throw std::invalid_argument("fit: weight function returned the wrong length");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(theta[i]) || theta[i] < 0.0) {
            throw std::invalid_argument("fit: weight at input " + std::to_string(i) + " is negative or not finite");
        }
    }

    const Eigen::VectorXd u = theta / static_cast<double>(n);
    const OperatorRep rep(data.xs, u, kernel);
    const Eigen::VectorXd rhs = u.cwiseProduct(data.ys);

    Regressor out;
    out.expansion = KernelExpansion{data.xs, apply_filter(rep, filter, rhs), kernel};
    out.lam = filter.lam;
    out.filter = filter;
    out.weights_used = std::move(theta);
    // trace(B) = sum_k u_k K(x_k, x_k) bounds the top eigenvalue.
    if (u.sum() > 1.0 && n <= kDenseSolveLimit) {
        const double top = rep.lambda_max();
        if (top > kappa_sq(kernel)) out.lambda_max_above_kappa = top;
    }
    return out;
}

double schedule_lambda(std::size_t n_f, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("schedule_lambda: exponent s must be positive");
    if (n_f == 0) throw std::invalid_argument("schedule_lambda: n_f must be positive");
    return std::pow(static_cast<double>(n_f), -s);
}

double select_exponent_s(double beta, double iota, double r, double epsilon) {
    if (!(beta >= 1.0)) throw std::invalid_argument("select_exponent_s: beta must be >= 1");
    if (!(iota >= 0.5)) throw std::invalid_argument("select_exponent_s: iota must be >= 1/2");
    if (!(r >= 0.5)) throw std::invalid_argument("select_exponent_s: r must be >= 1/2");
    if (!(epsilon > 0.0)) throw std::invalid_argument("select_exponent_s: epsilon must be positive");

    const double rate = iota / (2.0 * iota + 1.0);
    const double optimal = 1.0 / (2.0 * r + 1.0);
    double s;
    if (beta >= 1.0 + 1.0 / (2.0 * iota)) {
        s = optimal - epsilon;
    } else {
        const double T = (1.0 + 1.0 / (2.0 * iota)) / beta - 1.0;
        if (r < 0.5 + T) {
            s = beta * rate - epsilon;
        } else if (r <= 0.5 + 1.0 / T) {
            s = optimal - epsilon;
        } else {
            s = beta * rate * std::min(1.0, 2.0 / (2.0 * r - 1.0)) - epsilon;
        }
    }
    if (!(s > 0.0)) throw std::invalid_argument("select_exponent_s: epsilon too large, use a smaller epsilon");
    return s;
}

std::vector<InequalityCheck> sample_size_diagnostic(const SampleSizeInputs& in) {
    const double nt = static_cast<double>(in.n_theta);
    const double nf = static_cast<double>(in.n_f);
    const double k2 = in.kappa_sq;
    const double ls = in.norm_source;
    const double lt = in.norm_target;
    const double sigma = 1.0 / (2.0 * in.iota + 1.0);
    const double nu = (1.0 / in.m) * (2.0 * in.iota / (2.0 * in.iota + 1.0));
    // min{1, 2/(2r-1)}, which is 1 at r = 1/2.
    const double smooth = in.r > 0.5 ? std::min(1.0, 2.0 / (2.0 * in.r - 1.0)) : 1.0;
    const double dr_const = std::pow(1.0 - in.alpha, -1.5) * in.delta_phi + std::sqrt(in.xi_m);

    auto make = [](std::string name, double lhs, double rhs) {
        return InequalityCheck{std::move(name), lhs, rhs, lhs >= rhs, lhs - rhs};
    };

    std::vector<InequalityCheck> out;
    {
        const double lhs = std::pow(nt, in.iota / (2.0 * in.iota + 1.0) * smooth - 2.0 * nu);
        const double rhs =
            2.0 * k2 / std::min(lt, 1.0) * dr_const * std::log(36.0 / in.delta) * std::pow(nf, in.s);
        out.push_back(make("coupled_n_theta", lhs, rhs));
    }
    {
        const double lhs = std::pow(nf, 1.0 / (2.0 * in.r + 1.0) - in.s);
        const double rhs = 14.0 * k2 *
                           (std::log(24.0 * k2 * (lt + 2.0) / (lt * in.delta)) + 1.0 + 1.0 / (2.0 * in.r)) *
                           std::pow(nt, 2.0 * nu);
        out.push_back(make("coupled_n_f", lhs, rhs));
    }
    {
        const double expo = 2.0 / (1.0 - sigma);
        const double inner =
            1.0 + std::log(6.0 * k2 * (ls + lt + 1.0) / (std::min(ls, lt) * in.delta)) + 2.0 / (1.0 - sigma);
        out.push_back(make("relative_ratio_n_theta", nt, 85.0 * k2 * std::pow(inner, expo)));
    }
    return out;
}

}  // namespace covshift
